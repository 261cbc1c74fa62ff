#pragma once

#include <numbers>

namespace pllstab {

/// Physical parameters of the single-converter test system. Impedances are in
/// p.u. on (s_base, u_base) except the fault resistance, which is in ohms.
/// Defaults are the single-machine test system parameters.
struct CircuitParams {
  double s_base = 100.0;  // MVA
  double u_base = 230.0;  // kV
  double omega0 = 100.0 * std::numbers::pi;
  double r_g = 0.0, x_g = 0.12;
  double r_c = 0.0, x_c = 0.36;
  double r_l = 0.5, x_l = 5.0;
  double r_f_ohm = 1.0;
  double u_g = 1.1;
  double k_i = 100.0;
  double k_p = 10.0;
  double i_c = 1.0;
  double phi_i = 0.0;

  /// Base impedance in ohms, u_base^2 / s_base.
  double z_base() const { return u_base * u_base / s_base; }
  double r_f_pu() const { return r_f_ohm / z_base(); }
};

/// Throws InvalidParameterError when an invariant is violated. The fault
/// resistance is only checked when `for_fault` is set.
void validate(const CircuitParams& p, bool for_fault);

/// U_c = Z_eq1 U_g + Z_eq2 I_c in polar form.
struct NetworkEquivalents {
  double z_eq1 = 0.0;
  double theta1 = 0.0;
  double z_eq2 = 0.0;
  double theta2 = 0.0;
  bool faulted = false;
};

/// Coefficients of the reduced PLL swing dynamics
///   d(delta)/dt = omega
///   d(omega)/dt = p_m - p_e sin(delta - theta1) - d_c cos(delta - theta1) omega
struct SwingParams {
  double p_m = 0.0;
  double p_e = 0.0;
  double d_c = 0.0;
  double theta1 = 0.0;
};

struct EquilibriumPair {
  double delta_sep = 0.0;
  double delta_uep = 0.0;
  int branch_k = 0;
};

/// Thevenin-style reduction of the network seen by the converter.
/// `faulted` places R_f in parallel with the load.
NetworkEquivalents network_equivalents(const CircuitParams& p, bool faulted);

SwingParams swing_params(const NetworkEquivalents& ne, const CircuitParams& p);

/// SEP/UEP of the 2k*pi family. Throws NoEquilibriumError if |p_m/p_e| > 1.
EquilibriumPair equilibria(const SwingParams& sp, int k = 0);

/// Short-circuit ratio taken as 1/|Z_eq2| of the unfaulted network. Returns
/// +infinity when z_eq2 is zero.
double scr(const NetworkEquivalents& ne);

/// Maps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace pllstab
