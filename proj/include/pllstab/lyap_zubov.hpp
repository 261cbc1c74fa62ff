#pragma once

#include <ostream>

#include "pllstab/circuit.hpp"
#include "pllstab/dynsim.hpp"
#include "pllstab/poly2.hpp"

namespace pllstab {

struct ZubovOptions {
  int m = 16;    // series degree
  int m_t = 16;  // Taylor degree of the field
  // phi = phi_delta * d^2 + phi_omega * w^2
  double phi_delta = 1.0;
  double phi_omega = 0.05;
  // Critical-level search grid over SEP-centered coordinates.
  int grid = 400;
  double half_width_delta = 3.0 * 3.14159265358979323846;
  double half_width_omega = 40.0;
  double exclusion_radius = 0.05;
  int segment_samples = 128;
};

/// Truncated Zubov series V with level c. Coordinates are SEP-centered.
struct ZubovCertificate {
  SwingParams sp;
  double delta_sep = 0.0;
  Poly2 v;
  double c = 0.0;
  double residual = 0.0;  // max |coefficient| of grad(V).F_T + phi (1 - V) up to degree m
  ZubovOptions opts;
};

/// Degree-by-degree solution of grad(V).F = -phi (1 - V). Throws
/// NotHurwitzError if the linear part at the SEP is not Hurwitz and
/// ResonanceError if a homogeneous equation is singular.
Poly2 zubov_series(const SwingParams& sp, double delta_sep, const ZubovOptions& opts,
                   double* residual = nullptr);

/// Largest level whose sublevel component around the SEP stays inside the
/// region where the exact V-dot is negative (priority flood on a grid, then
/// bisection on the first offending grid edge).
double zubov_critical(const Poly2& v, const SwingParams& sp, double delta_sep,
                      const ZubovOptions& opts);

ZubovCertificate build_zubov(const SwingParams& sp, const ZubovOptions& opts = {});

/// Stable iff V <= c at x and along the segment from the SEP to x.
bool judge(const ZubovCertificate& c, const ReducedState& x);

void write_certificate_csv(std::ostream& os, const ZubovCertificate& c);

CctResult zubov_cct(const Scenario& tmpl, double rf_ohm, const ZubovOptions& zo = {},
                    JudgeInstant instant = JudgeInstant::kClearing, const CctOptions& opts = {});

}  // namespace pllstab
