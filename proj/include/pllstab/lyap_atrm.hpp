#pragma once

#include <ostream>
#include <vector>

#include "pllstab/circuit.hpp"
#include "pllstab/dynsim.hpp"
#include "pllstab/poly2.hpp"

namespace pllstab {

struct AtrmOptions {
  // Seed p0 = seed_delta * d^2 + seed_omega * w^2, level set p = k0.
  double seed_delta = 1.0;
  double seed_omega = 0.01;
  double k0 = 0.8;
  double dt_p = 1e-4;
  double tau = 0.3;                 // tangency threshold on cos(grad p, F)
  std::vector<int> schedule{2, 4};  // degree of each stage
  double eps0 = 0.01;               // restart offset (pseudo-time) before a stage's t_s
  double stage_budget = 1.0;        // pseudo-time per stage
  int rays = 256;
  double omega_scale = 10.0;  // ray direction (cos a, omega_scale sin a)
  double r_max = 6.0;
  int coarse = 600;
  int segment_samples = 128;
};

/// Boundary points of {p = k0}, one per ray (SEP-centered).
std::vector<ReducedState> atrm_boundary(const Poly2& p, double k0, const AtrmOptions& opts);

/// Largest cos of the angle between grad p and the exact field over the
/// boundary; positive values mean the field leaves the sublevel set.
double atrm_tangency(const Poly2& p, const SwingParams& sp, double delta_sep,
                     const std::vector<ReducedState>& boundary);

struct AtrmStage {
  int degree = 0;
  double t_s = 0.0;        // pseudo-time at which the boundary turned tangent
  Poly2 last_safe;         // last iterate before t_s
  Poly2 restart;           // iterate eps0 before t_s
};

/// Evolves dp/dt = trunc(grad p . F_T) with RK4 until the tangency test
/// exceeds tau. Throws EvolutionDivergedError when a ray leaves r_max and
/// BudgetExceededError if no tangency occurs within the stage budget.
AtrmStage atrm_evolve(const Poly2& p0, int degree, const SwingParams& sp, double delta_sep,
                      const AtrmOptions& opts);

struct AtrmCertificate {
  SwingParams sp;
  double delta_sep = 0.0;
  Poly2 p;
  double k0 = 0.8;
  std::vector<AtrmStage> stages;
  AtrmOptions opts;
};

AtrmCertificate build_atrm(const SwingParams& sp, const AtrmOptions& opts = {});

/// Stable iff p <= k0 at x and along the segment from the SEP to x.
bool judge(const AtrmCertificate& c, const ReducedState& x);

void write_certificate_csv(std::ostream& os, const AtrmCertificate& c);

/// Boundary polyline in absolute coordinates, "delta,omega" rows.
void write_boundary_csv(std::ostream& os, const AtrmCertificate& c);

CctResult atrm_cct(const Scenario& tmpl, double rf_ohm, const AtrmOptions& ao = {},
                   JudgeInstant instant = JudgeInstant::kClearing, const CctOptions& opts = {});

}  // namespace pllstab
