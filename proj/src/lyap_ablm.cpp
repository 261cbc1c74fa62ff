#include "pllstab/lyap_ablm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pllstab {

const char* to_string(AblmPath p) { return p == AblmPath::kRay ? "ray" : "trapezoid"; }

double energy_conservative(const SwingParams& sp, double delta_sep, double delta,
                           double omega) {
  return 0.5 * omega * omega - sp.p_m * (delta - delta_sep) -
         sp.p_e * (std::cos(delta - sp.theta1) - std::cos(delta_sep - sp.theta1));
}

double damping_ray(const SwingParams& sp, double delta_sep, double delta, double omega) {
  const double a = delta_sep - sp.theta1;
  const double dd = delta - delta_sep;
  if (std::abs(dd) > 1e-3) {
    return sp.d_c * omega * std::sin(delta - sp.theta1) +
           sp.d_c * omega * (std::cos(delta - sp.theta1) - std::cos(a)) / dd;
  }
  // d_c w dd * sum_n cos^(n)(a) dd^n / (n! (n + 2)); avoids cancellation.
  const double dcos[4] = {std::cos(a), -std::sin(a), -std::cos(a), std::sin(a)};
  double sum = 0.0;
  double term = 1.0;  // dd^n / n!
  for (int n = 0; n < 12; ++n) {
    if (n > 0) term *= dd / n;
    sum += dcos[n % 4] * term / (n + 2);
  }
  return sp.d_c * omega * dd * sum;
}

double damping_trapezoid(const SwingParams& sp, double delta_sep, double delta, double omega) {
  return 0.5 * sp.d_c * std::cos(delta - sp.theta1) * omega * (delta - delta_sep);
}

double v_ablm(const AblmCertificate& c, double delta, double omega) {
  const double e = c.path == AblmPath::kRay ? damping_ray(c.sp, c.delta_sep, delta, omega)
                                            : damping_trapezoid(c.sp, c.delta_sep, delta, omega);
  return energy_conservative(c.sp, c.delta_sep, delta, omega) + e;
}

AblmCertificate build_ablm(const SwingParams& sp, AblmPath path) {
  const EquilibriumPair eq = equilibria(sp, 0);
  AblmCertificate c{sp, eq.delta_sep, path, 0.0};
  // UEPs bracketing the SEP: delta_uep and delta_uep - 2 pi.
  c.v_cr = std::min(v_ablm(c, eq.delta_uep, 0.0),
                    v_ablm(c, eq.delta_uep - 2.0 * std::numbers::pi, 0.0));
  return c;
}

bool judge(const AblmCertificate& c, const ReducedState& x) {
  return v_ablm(c, x.delta, x.omega) < c.v_cr;
}

CctResult ablm_cct(const Scenario& tmpl, double rf_ohm, AblmPath path, JudgeInstant instant,
                   const CctOptions& opts) {
  Scenario sc = tmpl;
  sc.params.r_f_ohm = rf_ohm;
  const SwingParams sp = swing_params(network_equivalents(sc.params, false), sc.params);
  const AblmCertificate cert = build_ablm(sp, path);
  return estimate_cct(sc, [&](const ReducedState& x) { return judge(cert, x); }, instant, opts);
}

}  // namespace pllstab
