#include "pllstab/lyap_atrm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>

#include "pllstab/errors.hpp"

namespace pllstab {

std::vector<ReducedState> atrm_boundary(const Poly2& p, double k0, const AtrmOptions& opts) {
  std::vector<ReducedState> out;
  out.reserve(static_cast<std::size_t>(opts.rays));
  for (int r = 0; r < opts.rays; ++r) {
    const double a = 2.0 * std::numbers::pi * r / opts.rays;
    const double ud = std::cos(a);
    const double uw = opts.omega_scale * std::sin(a);
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= opts.coarse; ++k) {
      const double s = opts.r_max * k / opts.coarse;
      if (p.eval(s * ud, s * uw) > k0) {
        hi = s;
        break;
      }
      lo = s;
    }
    if (hi < 0.0) return {};
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (p.eval(mid * ud, mid * uw) > k0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back({lo * ud, lo * uw});
  }
  return out;
}

double atrm_tangency(const Poly2& p, const SwingParams& sp, double delta_sep,
                     const std::vector<ReducedState>& boundary) {
  double worst = -1.0;
  for (const ReducedState& b : boundary) {
    const auto [gd, gw] = p.grad(b.delta, b.omega);
    const auto [f1, f2] = rhs({b.delta + delta_sep, b.omega}, sp);
    const double den = std::hypot(gd, gw) * std::hypot(f1, f2);
    if (den == 0.0) continue;
    worst = std::max(worst, (gd * f1 + gw * f2) / den);
  }
  return worst;
}

AtrmStage atrm_evolve(const Poly2& p0, int degree, const SwingParams& sp, double delta_sep,
                      const AtrmOptions& opts) {
  const auto [f1, f2] = taylor_field(sp, delta_sep, degree);
  auto op = [&](const Poly2& p) { return lie_derivative(p, f1, f2, degree); };
  Poly2 p = p0.resized(degree, Overflow::kTruncate);
  std::deque<Poly2> history{p};
  const std::size_t keep = static_cast<std::size_t>(std::lround(opts.eps0 / opts.dt_p)) + 1;
  const double h = opts.dt_p;
  const long steps = static_cast<long>(std::ceil(opts.stage_budget / h - 1e-9));
  for (long s = 1; s <= steps; ++s) {
    const Poly2 k1 = op(p);
    const Poly2 k2 = op(p + (0.5 * h) * k1);
    const Poly2 k3 = op(p + (0.5 * h) * k2);
    const Poly2 k4 = op(p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const std::vector<ReducedState> bnd = atrm_boundary(p, opts.k0, opts);
    if (bnd.empty()) {
      throw EvolutionDivergedError("level set left the search radius at t = " +
                                   std::to_string(s * h));
    }
    if (atrm_tangency(p, sp, delta_sep, bnd) > opts.tau) {
      AtrmStage st;
      st.degree = degree;
      st.t_s = s * h;
      st.last_safe = history.back();
      st.restart = history.front();
      return st;
    }
    history.push_back(p);
    if (history.size() > keep) history.pop_front();
  }
  throw BudgetExceededError("no tangency within the stage budget");
}

AtrmCertificate build_atrm(const SwingParams& sp, const AtrmOptions& opts) {
  if (opts.schedule.empty()) throw InvalidParameterError("empty ATRM degree schedule");
  if (!(opts.dt_p > 0.0 && opts.k0 > 0.0)) throw InvalidParameterError("bad ATRM options");
  AtrmCertificate c;
  c.sp = sp;
  c.delta_sep = equilibria(sp, 0).delta_sep;
  c.k0 = opts.k0;
  c.opts = opts;
  Poly2 p(2);
  p.coeff(2, 0) = opts.seed_delta;
  p.coeff(0, 2) = opts.seed_omega;
  for (std::size_t i = 0; i < opts.schedule.size(); ++i) {
    const AtrmStage st = atrm_evolve(p, opts.schedule[i], sp, c.delta_sep, opts);
    c.stages.push_back(st);
    p = st.restart;
  }
  c.p = c.stages.back().last_safe;
  return c;
}

bool judge(const AtrmCertificate& c, const ReducedState& x) {
  const double d = x.delta - c.delta_sep;
  const double w = x.omega;
  const int n = std::max(1, c.opts.segment_samples);
  for (int k = n; k >= 1; --k) {
    const double s = static_cast<double>(k) / n;
    if (!(c.p.eval(s * d, s * w) <= c.k0)) return false;
  }
  return true;
}

void write_certificate_csv(std::ostream& os, const AtrmCertificate& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# atrm degree=%d k0=%.17g delta_sep=%.17g t_s=%.17g\n",
                c.p.max_degree(), c.k0, c.delta_sep, c.stages.back().t_s);
  os << buf;
  write_coefficients_csv(os, c.p);
}

void write_boundary_csv(std::ostream& os, const AtrmCertificate& c) {
  os << "delta,omega\n";
  char buf[64];
  for (const ReducedState& b : atrm_boundary(c.p, c.k0, c.opts)) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", b.delta + c.delta_sep, b.omega);
    os << buf;
  }
}

CctResult atrm_cct(const Scenario& tmpl, double rf_ohm, const AtrmOptions& ao,
                   JudgeInstant instant, const CctOptions& opts) {
  Scenario sc = tmpl;
  sc.params.r_f_ohm = rf_ohm;
  const SwingParams sp = swing_params(network_equivalents(sc.params, false), sc.params);
  const AtrmCertificate cert = build_atrm(sp, ao);
  return estimate_cct(sc, [&](const ReducedState& x) { return judge(cert, x); }, instant, opts);
}

}  // namespace pllstab
