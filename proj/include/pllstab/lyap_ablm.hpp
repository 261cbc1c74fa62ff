#pragma once

#include <vector>

#include "pllstab/circuit.hpp"
#include "pllstab/dynsim.hpp"

namespace pllstab {

/// Integration path for the damping energy.
enum class AblmPath { kRay, kTrapezoid };

const char* to_string(AblmPath p);

/// Energy-function certificate with a path-dependent damping term.
struct AblmCertificate {
  SwingParams sp;
  double delta_sep = 0.0;
  AblmPath path = AblmPath::kRay;
  double v_cr = 0.0;  // minimum of V over the nearest UEPs
};

/// Damping energy along the straight ray from the SEP to (delta, omega).
double damping_ray(const SwingParams& sp, double delta_sep, double delta, double omega);

/// Damping energy by the trapezoid rule on the same ray.
double damping_trapezoid(const SwingParams& sp, double delta_sep, double delta, double omega);

/// Conservative part: kinetic plus potential energy relative to the SEP.
double energy_conservative(const SwingParams& sp, double delta_sep, double delta, double omega);

double v_ablm(const AblmCertificate& c, double delta, double omega);

AblmCertificate build_ablm(const SwingParams& sp, AblmPath path);

/// Stable iff V(x) < v_cr.
bool judge(const AblmCertificate& c, const ReducedState& x);

/// CCT from the post-fault network of `tmpl` with fault resistance `rf_ohm`.
CctResult ablm_cct(const Scenario& tmpl, double rf_ohm, AblmPath path,
                   JudgeInstant instant = JudgeInstant::kClearing, const CctOptions& opts = {});

}  // namespace pllstab
