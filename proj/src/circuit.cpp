#include "pllstab/circuit.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "pllstab/errors.hpp"

namespace pllstab {

using cplx = std::complex<double>;

double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

void validate(const CircuitParams& p, bool for_fault) {
  auto fail = [](const std::string& msg) { throw InvalidParameterError(msg); };
  if (!(p.s_base > 0.0)) fail("s_base must be positive");
  if (!(p.u_base > 0.0)) fail("u_base must be positive");
  for (double r : {p.r_g, p.r_c, p.r_l}) {
    if (!(r >= 0.0)) fail("resistances must be non-negative");
  }
  if (!(std::hypot(p.r_l, p.x_l) > 0.0)) fail("|Z_l| must be positive");
  if (!(p.u_g > 0.0)) fail("u_g must be positive");
  if (!(p.i_c >= 0.0)) fail("i_c must be non-negative");
  if (!(p.k_i > 0.0)) fail("k_i must be positive");
  if (!(p.k_p > 0.0)) fail("k_p must be positive");
  if (!std::isfinite(p.phi_i)) fail("phi_i must be finite");
  if (for_fault && !(p.r_f_ohm > 0.0)) fail("r_f_ohm must be positive");
}

NetworkEquivalents network_equivalents(const CircuitParams& p, bool faulted) {
  const cplx zg(p.r_g, p.x_g);
  const cplx zc(p.r_c, p.x_c);
  cplx zl(p.r_l, p.x_l);
  if (faulted) {
    const cplx rf(p.r_f_pu(), 0.0);
    zl = zl * rf / (zl + rf);
  }
  const cplx den = zg + zl;
  if (std::abs(den) < 1e-12) {
    throw SingularNetworkError("|Z_g + Z'_l| vanished");
  }
  const cplx eq1 = zl / den;
  const cplx eq2 = zl * zg / den + zc;
  NetworkEquivalents ne;
  ne.z_eq1 = std::abs(eq1);
  ne.theta1 = ne.z_eq1 > 0.0 ? wrap_angle(std::arg(eq1)) : 0.0;
  ne.z_eq2 = std::abs(eq2);
  ne.theta2 = ne.z_eq2 > 0.0 ? wrap_angle(std::arg(eq2)) : 0.0;
  ne.faulted = faulted;
  return ne;
}

SwingParams swing_params(const NetworkEquivalents& ne, const CircuitParams& p) {
  SwingParams sp;
  sp.p_m = p.k_i * ne.z_eq2 * p.i_c * std::sin(ne.theta2 + p.phi_i);
  sp.p_e = p.k_i * ne.z_eq1 * p.u_g;
  sp.d_c = p.k_p * ne.z_eq1 * p.u_g;
  sp.theta1 = ne.theta1;
  return sp;
}

EquilibriumPair equilibria(const SwingParams& sp, int k) {
  if (!(sp.p_e > 0.0) || std::abs(sp.p_m / sp.p_e) > 1.0) {
    throw NoEquilibriumError("|p_m/p_e| > 1: converter cannot synchronize");
  }
  const double s = std::asin(sp.p_m / sp.p_e);
  const double shift = 2.0 * std::numbers::pi * k;
  EquilibriumPair eq;
  eq.delta_sep = sp.theta1 + s + shift;
  eq.delta_uep = sp.theta1 + std::numbers::pi - s + shift;
  eq.branch_k = k;
  return eq;
}

double scr(const NetworkEquivalents& ne) {
  if (ne.z_eq2 == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / ne.z_eq2;
}

}  // namespace pllstab
