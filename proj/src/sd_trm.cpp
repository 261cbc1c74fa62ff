#include "pllstab/sd_trm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "pllstab/errors.hpp"

namespace pllstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reversed field F' = -F.
ReducedState reversed(const ReducedState& x, const SwingParams& sp) {
  const auto [a, b] = rhs(x, sp);
  return {-a, -b};
}

ReducedState rk4_rev(const ReducedState& x, double h, const SwingParams& sp) {
  const ReducedState k1 = reversed(x, sp);
  const ReducedState k2 = reversed({x.delta + 0.5 * h * k1.delta, x.omega + 0.5 * h * k1.omega}, sp);
  const ReducedState k3 = reversed({x.delta + 0.5 * h * k2.delta, x.omega + 0.5 * h * k2.omega}, sp);
  const ReducedState k4 = reversed({x.delta + h * k3.delta, x.omega + h * k3.omega}, sp);
  return {x.delta + h / 6.0 * (k1.delta + 2.0 * k2.delta + 2.0 * k3.delta + k4.delta),
          x.omega + h / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega)};
}

BoundaryCurve trace_branch(const SwingParams& sp, int k, double uep, double vd, double vw,
                           double sign, const Window& win, const TraceOptions& opts) {
  BoundaryCurve c;
  c.uep_branch = k;
  c.side = sign * vd > 0.0 ? Side::kRight : Side::kLeft;
  ReducedState x{uep, 0.0};
  c.points.push_back(x);
  x = {uep + sign * opts.eps_seed * vd, sign * opts.eps_seed * vw};
  c.points.push_back(x);
  double t = 0.0;
  c.terminated_by = Termination::kTimeBudget;
  while (t < opts.time_budget) {
    const ReducedState f = reversed(x, sp);
    const double speed = std::hypot(f.delta, f.omega);
    const double h = std::min(opts.h_max, speed > 0.0 ? 0.9 * opts.ds_max / speed : opts.h_max);
    x = rk4_rev(x, h, sp);
    t += h;
    if (!std::isfinite(x.delta) || !std::isfinite(x.omega)) break;
    if (!win.contains(x.delta, x.omega)) {
      c.terminated_by = Termination::kWindowExit;
      break;
    }
    c.points.push_back(x);
  }
  return c;
}

}  // namespace

Window default_window(const SwingParams& sp) {
  const double sep = equilibria(sp, 0).delta_sep;
  return {sep - 3.0 * std::numbers::pi, sep + 3.0 * std::numbers::pi, -40.0, 40.0};
}

const char* to_string(Side s) { return s == Side::kLeft ? "left" : "right"; }

const char* to_string(SdFormKind k) {
  switch (k) {
    case SdFormKind::kOverlappingBand: return "overlapping_band";
    case SdFormKind::kPartialOverlap: return "partial_overlap";
    case SdFormKind::kDisjoint: return "disjoint";
  }
  return "?";
}

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kKi: return "k_i";
    case SweepParam::kKp: return "k_p";
    case SweepParam::kIcd: return "i_cd";
  }
  return "?";
}

std::vector<BoundaryCurve> trm_boundary(const SwingParams& sp, int k_min, int k_max,
                                        const Window& window, const TraceOptions& opts) {
  if (!(window.delta_max > window.delta_min && window.omega_max > window.omega_min)) {
    throw WindowTooSmallError("empty tracing window");
  }
  const double uep0 = equilibria(sp, 0).delta_uep;
  // Jacobian of F at a UEP (omega = 0): [[0, 1], [-p_e c, -d_c c]].
  const double c = std::cos(uep0 - sp.theta1);
  const double j21 = -sp.p_e * c;
  const double j22 = -sp.d_c * c;
  const double disc = j22 * j22 + 4.0 * j21;
  if (!(disc > 0.0) || !(j21 > 0.0)) {
    throw NotASaddleError("Jacobian at the UEP is not a saddle");
  }
  // Stable eigenvalue of F is the unstable one of F'; eigenvector (1, lambda).
  const double lam = 0.5 * (j22 - std::sqrt(disc));
  const double norm = std::hypot(1.0, lam);
  const double vd = 1.0 / norm;
  const double vw = lam / norm;

  std::vector<BoundaryCurve> out;
  for (int k = k_min; k <= k_max; ++k) {
    const double uep = uep0 + kTwoPi * k;
    if (!window.contains(uep, 0.0)) continue;
    for (double sign : {-1.0, 1.0}) {
      out.push_back(trace_branch(sp, k, uep, vd, vw, sign, window, opts));
    }
  }
  if (out.empty()) throw WindowTooSmallError("no UEP inside the tracing window");
  return out;
}

SdRaster::SdRaster(const std::vector<BoundaryCurve>& curves, const SwingParams& sp,
                   const Window& window, int nx, int ny)
    : window_(window), nx_(nx), ny_(ny), period_(kTwoPi),
      labels_(static_cast<std::size_t>(nx) * ny, -1) {
  auto at = [&](int x, int y) -> int& { return labels_[static_cast<std::size_t>(y) * nx_ + x]; };
  const double cw = (window_.delta_max - window_.delta_min) / nx_;
  const double ch = (window_.omega_max - window_.omega_min) / ny_;
  for (const BoundaryCurve& c : curves) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      all_points_.push_back(c.points[i]);
      const ReducedState a = c.points[i];
      const ReducedState b = i + 1 < c.points.size() ? c.points[i + 1] : a;
      // Dense sampling of each segment gives an 8-connected wall.
      const int n = 1 + static_cast<int>(std::max(std::abs(b.delta - a.delta) / cw,
                                                   std::abs(b.omega - a.omega) / ch) * 2.0);
      int px = -1, py = -1;
      for (int s = 0; s <= n; ++s) {
        const double u = static_cast<double>(s) / n;
        const double d = a.delta + u * (b.delta - a.delta);
        const double w = a.omega + u * (b.omega - a.omega);
        if (!window_.contains(d, w)) continue;
        const int x = cell_x(d), y = cell_y(w);
        at(x, y) = -2;
        // Close diagonal steps so a 4-connected fill cannot leak.
        if (px >= 0 && px != x && py != y) at(x, py) = -2;
        px = x;
        py = y;
      }
    }
  }
  const double sep0 = equilibria(sp, 0).delta_sep;
  const int kmin = static_cast<int>(std::floor((window_.delta_min - sep0) / kTwoPi)) - 1;
  const int kmax = static_cast<int>(std::ceil((window_.delta_max - sep0) / kTwoPi)) + 1;
  for (int k = kmin; k <= kmax; ++k) {
    const double d = sep0 + kTwoPi * k;
    if (!window_.contains(d, 0.0)) continue;
    const int sx = cell_x(d), sy = cell_y(0.0);
    if (at(sx, sy) != -1) continue;
    std::queue<std::pair<int, int>> q;
    at(sx, sy) = k + offset_;
    q.push({sx, sy});
    while (!q.empty()) {
      const auto [x, y] = q.front();
      q.pop();
      const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const auto& n : nb) {
        if (n[0] < 0 || n[0] >= nx_ || n[1] < 0 || n[1] >= ny_) continue;
        if (at(n[0], n[1]) != -1) continue;
        at(n[0], n[1]) = k + offset_;
        q.push({n[0], n[1]});
      }
    }
  }
}

int SdRaster::cell_x(double d) const {
  const int x = static_cast<int>((d - window_.delta_min) / (window_.delta_max - window_.delta_min) * nx_);
  return std::clamp(x, 0, nx_ - 1);
}

int SdRaster::cell_y(double w) const {
  const int y = static_cast<int>((w - window_.omega_min) / (window_.omega_max - window_.omega_min) * ny_);
  return std::clamp(y, 0, ny_ - 1);
}

std::optional<int> SdRaster::label(double delta, double omega) const {
  if (!window_.contains(delta, omega)) return std::nullopt;
  const int v = labels_[static_cast<std::size_t>(cell_y(omega)) * nx_ + cell_x(delta)];
  if (v < 0) return std::nullopt;
  return v - offset_;
}

bool SdRaster::has_covered_row() const {
  const double cw = (window_.delta_max - window_.delta_min) / nx_;
  const int span = static_cast<int>(std::ceil(period_ / cw));
  if (span > nx_) return false;
  for (int y = 0; y < ny_; ++y) {
    int run = 0;
    for (int x = 0; x < nx_; ++x) {
      const int v = labels_[static_cast<std::size_t>(y) * nx_ + x];
      run = (v >= 0 || v == -2) ? run + 1 : 0;
      if (run >= span) return true;
    }
  }
  return false;
}

double SdRaster::distance_to_curves(double delta, double omega) const {
  double best = std::numeric_limits<double>::infinity();
  for (const ReducedState& p : all_points_) {
    best = std::min(best, std::hypot(p.delta - delta, p.omega - omega));
  }
  return best;
}

SdForm classify_sd_form(const std::vector<BoundaryCurve>& curves, const SwingParams& sp,
                        const ProbeOptions& opts) {
  if (curves.empty()) throw InvalidParameterError("no boundary curves to classify");
  double wmin = std::numeric_limits<double>::infinity();
  double wmax = -wmin;
  for (const BoundaryCurve& c : curves) {
    for (const ReducedState& p : c.points) {
      wmin = std::min(wmin, p.omega);
      wmax = std::max(wmax, p.omega);
    }
  }
  const double sep = equilibria(sp, 0).delta_sep;
  const double step = opts.level_step;
  const int lo = static_cast<int>(std::ceil(wmin / step - 1e-9));
  const int hi = static_cast<int>(std::floor(wmax / step + 1e-9));

  SdForm out;
  std::vector<std::pair<double, bool>> levels;
  std::vector<ReducedState> undecided;
  for (int l = lo; l <= hi; ++l) {
    const double w = l * step;
    bool all_stable = true;
    bool any_undetermined = false;
    std::vector<ReducedState> pending;
    for (int i = 0; i < opts.delta_points; ++i) {
      const ReducedState x{sep + kTwoPi * i / opts.delta_points, w};
      const Verdict v = point_stability_oracle(x, sp, opts.oracle);
      if (v.kind == VerdictKind::kUnstable) {
        // A probe on the separatrix between two domains escapes although
        // both neighbors settle; such a hit does not break the band.
        const double e = opts.separatrix_offset;
        const Verdict a = point_stability_oracle({x.delta - e, w}, sp, opts.oracle);
        const Verdict b = point_stability_oracle({x.delta + e, w}, sp, opts.oracle);
        if (a.stable() && b.stable() && a.k != b.k) continue;
        all_stable = false;
        break;
      }
      if (v.kind == VerdictKind::kUndetermined) {
        any_undetermined = true;
        pending.push_back(x);
      }
    }
    if (all_stable && any_undetermined) {
      undecided.insert(undecided.end(), pending.begin(), pending.end());
      all_stable = false;
    }
    levels.push_back({w, all_stable});
    if (all_stable) out.band_levels.push_back(w);
  }

  // The band is the run of safe levels that starts at the bottom of the range.
  std::size_t run = 0;
  while (run < levels.size() && levels[run].second) ++run;
  if (run == 0 && !undecided.empty() && !levels.empty() && !levels[0].second) {
    // The bottom level was decided by an undetermined probe.
    for (const ReducedState& x : undecided) {
      if (x.omega == levels[0].first) {
        std::ostringstream msg;
        msg << "undetermined probes at omega = " << x.omega;
        throw ClassificationInconclusiveError(msg.str());
      }
    }
  }
  if (run < levels.size()) {
    for (const ReducedState& x : undecided) {
      if (x.omega == levels[run].first) {
        std::ostringstream msg;
        msg << "undetermined probe at (" << x.delta << ", " << x.omega
            << ") ends the band";
        throw ClassificationInconclusiveError(msg.str());
      }
    }
  }
  if (run == 0) {
    out.form = SdFormKind::kDisjoint;
    return out;
  }
  out.omega_cr = levels[run - 1].first;
  out.form = *out.omega_cr >= 0.0 ? SdFormKind::kOverlappingBand : SdFormKind::kPartialOverlap;
  // Interior level: the highest band level with two safe levels on each side.
  for (std::size_t i = run; i-- > 0;) {
    if (i >= 2 && i + 2 < run) {
      out.recommended_level = levels[i].first;
      break;
    }
  }
  if (!out.recommended_level) out.recommended_level = levels[run / 2].first;
  return out;
}

std::vector<SweepEntry> sweep_parameter(const CircuitParams& base, SweepParam param,
                                        const std::vector<double>& values, int k_min,
                                        int k_max, const TraceOptions& opts) {
  std::vector<SweepEntry> out;
  for (double v : values) {
    CircuitParams p = base;
    switch (param) {
      case SweepParam::kKi: p.k_i = v; break;
      case SweepParam::kKp: p.k_p = v; break;
      case SweepParam::kIcd:
        p.i_c = v;
        p.phi_i = 0.0;
        break;
    }
    SweepEntry e;
    e.value = v;
    try {
      validate(p, false);
      const SwingParams sp = swing_params(network_equivalents(p, false), p);
      e.curves = trm_boundary(sp, k_min, k_max, default_window(sp), opts);
    } catch (const NoEquilibriumError& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

SdExtent sd_extent(const std::vector<BoundaryCurve>& curves) {
  SdExtent e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const BoundaryCurve& c : curves) {
    if (c.uep_branch != 0 && c.uep_branch != -1) continue;
    for (const ReducedState& p : c.points) {
      e.delta_min = std::min(e.delta_min, p.delta);
      e.delta_max = std::max(e.delta_max, p.delta);
      e.omega_min = std::min(e.omega_min, p.omega);
      e.omega_max = std::max(e.omega_max, p.omega);
    }
  }
  return e;
}

}  // namespace pllstab
