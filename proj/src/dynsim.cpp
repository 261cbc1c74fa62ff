#include "pllstab/dynsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "pllstab/errors.hpp"

namespace pllstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PllDerivative {
  double d_delta;
  double d_x_int;
};

PllDerivative pll_rhs(const PllState& s, const NetworkEquivalents& ne,
                      const CircuitParams& p) {
  const double u = u_cq(s.delta, ne, p);
  return {s.x_int + p.k_p * u, p.k_i * u};
}

PllState rk4_step(const PllState& s, double h, const NetworkEquivalents& ne,
                  const CircuitParams& p) {
  const PllDerivative k1 = pll_rhs(s, ne, p);
  const PllDerivative k2 =
      pll_rhs({s.delta + 0.5 * h * k1.d_delta, s.x_int + 0.5 * h * k1.d_x_int}, ne, p);
  const PllDerivative k3 =
      pll_rhs({s.delta + 0.5 * h * k2.d_delta, s.x_int + 0.5 * h * k2.d_x_int}, ne, p);
  const PllDerivative k4 = pll_rhs({s.delta + h * k3.d_delta, s.x_int + h * k3.d_x_int}, ne, p);
  return {s.delta + h / 6.0 * (k1.d_delta + 2.0 * k2.d_delta + 2.0 * k3.d_delta + k4.d_delta),
          s.x_int + h / 6.0 * (k1.d_x_int + 2.0 * k2.d_x_int + 2.0 * k3.d_x_int + k4.d_x_int)};
}

ReducedState rk4_reduced(const ReducedState& x, double h, const SwingParams& sp) {
  auto f = [&](double d, double w) { return rhs({d, w}, sp); };
  const auto [a1, b1] = f(x.delta, x.omega);
  const auto [a2, b2] = f(x.delta + 0.5 * h * a1, x.omega + 0.5 * h * b1);
  const auto [a3, b3] = f(x.delta + 0.5 * h * a2, x.omega + 0.5 * h * b2);
  const auto [a4, b4] = f(x.delta + h * a3, x.omega + h * b3);
  return {x.delta + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
          x.omega + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)};
}

// Integrates with the given network from t0 to t1 in steps of at most dt.
PllState integrate(PllState s, double t0, double t1, double dt,
                   const NetworkEquivalents& ne, const CircuitParams& p) {
  double t = t0;
  while (t1 - t > 1e-12) {
    const double h = std::min(dt, t1 - t);
    s = rk4_step(s, h, ne, p);
    t = (t1 - (t + h) < 1e-12) ? t1 : t + h;
  }
  return s;
}

PllState pre_fault_sep(const NetworkEquivalents& pre, const CircuitParams& p) {
  const EquilibriumPair eq = equilibria(swing_params(pre, p), 0);
  return {eq.delta_sep, -p.k_p * u_cq(eq.delta_sep, pre, p)};
}

}  // namespace

void validate(const Scenario& sc) {
  validate(sc.params, sc.t_clear > sc.t_fault);
  if (!(sc.t_fault >= 0.0 && sc.t_fault <= sc.t_clear && sc.t_clear <= sc.t_end)) {
    throw InvalidParameterError("need 0 <= t_fault <= t_clear <= t_end");
  }
  if (!(sc.dt > 0.0)) throw InvalidParameterError("dt must be positive");
  if (!(sc.omega_divergence_bound > 0.0)) {
    throw InvalidParameterError("divergence bound must be positive");
  }
  if (!(sc.settle_tol.delta > 0.0 && sc.settle_tol.omega > 0.0 && sc.settle_dwell >= 0.0)) {
    throw InvalidParameterError("settle tolerances must be positive");
  }
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::kFaultOn: return "fault_on";
    case EventKind::kFaultClear: return "fault_clear";
    case EventKind::kLvrtExit: return "lvrt_exit";
    case EventKind::kReset: return "reset";
    case EventKind::kSettled: return "settled";
    case EventKind::kDiverged: return "diverged";
  }
  return "?";
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::kStable: return "stable(" + std::to_string(v.k) + ")";
    case VerdictKind::kUnstable: return "unstable";
    case VerdictKind::kUndetermined: return "undetermined";
  }
  return "?";
}

bool TrajectoryRecord::has_event(EventKind k) const {
  return std::any_of(events.begin(), events.end(),
                     [k](const TrajectoryEvent& e) { return e.kind == k; });
}

double u_cq(double delta, const NetworkEquivalents& ne, const CircuitParams& p) {
  return ne.z_eq1 * p.u_g * std::sin(ne.theta1 - delta) +
         ne.z_eq2 * p.i_c * std::sin(ne.theta2 + p.phi_i);
}

double u_c_mag(double delta, const NetworkEquivalents& ne, const CircuitParams& p) {
  // Grid frame: U_c = Z_eq1 U_g + Z_eq2 I_c e^{j(delta + phi_i)}.
  const std::complex<double> uc = std::polar(ne.z_eq1 * p.u_g, ne.theta1) +
                                  std::polar(ne.z_eq2 * p.i_c, ne.theta2 + p.phi_i + delta);
  return std::abs(uc);
}

std::pair<double, double> rhs(const ReducedState& x, const SwingParams& sp) {
  const double a = x.delta - sp.theta1;
  return {x.omega, sp.p_m - sp.p_e * std::sin(a) - sp.d_c * std::cos(a) * x.omega};
}

ReducedState to_reduced(const PllState& s, const NetworkEquivalents& ne,
                        const CircuitParams& p) {
  return {s.delta, s.x_int + p.k_p * u_cq(s.delta, ne, p)};
}

PllState to_pll(const ReducedState& x, const NetworkEquivalents& ne, const CircuitParams& p) {
  return {x.delta, x.omega - p.k_p * u_cq(x.delta, ne, p)};
}

Classifier::Classifier(double delta_sep, const SettleTol& tol, double dwell,
                       double omega_bound)
    : delta_sep_(delta_sep), tol_(tol), dwell_(dwell), bound_(omega_bound) {}

std::optional<Verdict> Classifier::update(double t, double delta, double omega) {
  if (!(std::abs(omega) <= bound_)) return Verdict{VerdictKind::kUnstable, 0};
  const double rel = delta - delta_sep_;
  const int k = static_cast<int>(std::lround(rel / kTwoPi));
  const bool near = std::abs(rel - kTwoPi * k) < tol_.delta && std::abs(omega) < tol_.omega;
  if (!near) {
    settling_ = false;
    return std::nullopt;
  }
  if (!settling_ || k != branch_) {
    settling_ = true;
    branch_ = k;
    since_ = t;
  }
  if (t - since_ >= dwell_) return Verdict{VerdictKind::kStable, k};
  return std::nullopt;
}

TrajectoryRecord simulate(const Scenario& sc, LvrtExitHandler* controller,
                          const SimOptions& opts) {
  validate(sc);
  const CircuitParams& p = sc.params;
  const NetworkEquivalents pre = network_equivalents(p, false);
  const bool has_fault = sc.t_clear > sc.t_fault;
  const NetworkEquivalents fault = has_fault ? network_equivalents(p, true) : pre;
  const EquilibriumPair eq = equilibria(swing_params(pre, p), 0);

  auto network_at = [&](double t) -> const NetworkEquivalents& {
    return (has_fault && t >= sc.t_fault && t < sc.t_clear) ? fault : pre;
  };

  TrajectoryRecord rec;
  PllState s = pre_fault_sep(pre, p);
  Classifier cls(eq.delta_sep, sc.settle_tol, sc.settle_dwell, sc.omega_divergence_bound);
  const int stride = std::max(1, opts.record_stride);
  long step_count = 0;
  bool fault_on_logged = false;
  bool clear_logged = false;
  bool lvrt_done = false;
  bool verdict_set = false;

  auto record = [&](double t, bool force) {
    if (!opts.record_samples) return;
    if (!force && step_count % stride != 0) return;
    const NetworkEquivalents& ne = network_at(t);
    const double u = u_cq(s.delta, ne, p);
    Sample smp{t, s.delta, s.x_int + p.k_p * u, u, u_c_mag(s.delta, ne, p)};
    if (!rec.samples.empty() && rec.samples.back().t == t) {
      rec.samples.back() = smp;
    } else {
      rec.samples.push_back(smp);
    }
  };

  // Processes the state at time t (after switching); returns false to stop.
  auto visit = [&](double t) -> bool {
    if (!fault_on_logged && t >= sc.t_fault) {
      rec.events.push_back({sc.t_fault, EventKind::kFaultOn});
      fault_on_logged = true;
    }
    bool forced = false;
    if (!clear_logged && t >= sc.t_clear) {
      rec.events.push_back({sc.t_clear, EventKind::kFaultClear});
      rec.clear_state = to_reduced(s, pre, p);
      clear_logged = true;
      forced = true;
    }
    const NetworkEquivalents& ne = network_at(t);
    if (clear_logged && !lvrt_done && u_c_mag(s.delta, ne, p) >= sc.lvrt_exit_voltage) {
      lvrt_done = true;
      forced = true;
      rec.events.push_back({t, EventKind::kLvrtExit});
      rec.lvrt_exit_state = to_reduced(s, ne, p);
      if (opts.stop_at_lvrt_exit) {
        record(t, true);
        return false;
      }
      if (controller != nullptr && controller->on_lvrt_exit(t, s, ne, p)) {
        rec.events.push_back({t, EventKind::kReset});
        cls.restart();
      }
    }
    record(t, forced);
    const ReducedState x = to_reduced(s, ne, p);
    if (!std::isfinite(x.delta) || !std::isfinite(x.omega)) {
      const Sample& last = rec.samples.empty() ? Sample{} : rec.samples.back();
      throw NumericalFailure("non-finite PLL state", last.t, last.delta, last.omega);
    }
    if (!verdict_set) {
      std::optional<Verdict> v;
      if (!(std::abs(x.omega) <= sc.omega_divergence_bound)) {
        v = Verdict{VerdictKind::kUnstable, 0};
      } else if (clear_logged) {
        v = cls.update(t, x.delta, x.omega);
      }
      if (v) {
        rec.verdict = *v;
        verdict_set = true;
        rec.events.push_back({t, v->stable() ? EventKind::kSettled : EventKind::kDiverged});
        if (opts.stop_on_verdict) return false;
      }
    }
    return true;
  };

  double t = 0.0;
  if (!visit(t)) return rec;
  while (sc.t_end - t > 1e-12) {
    double boundary = sc.t_end;
    if (t < sc.t_fault - 1e-12) boundary = std::min(boundary, sc.t_fault);
    if (t < sc.t_clear - 1e-12) boundary = std::min(boundary, sc.t_clear);
    const double h = std::min(sc.dt, boundary - t);
    s = rk4_step(s, h, network_at(t), p);
    t = (boundary - (t + h) < 1e-12) ? boundary : t + h;
    ++step_count;
    if (!visit(t)) return rec;
  }
  if (!verdict_set) rec.verdict = Verdict{VerdictKind::kUndetermined, 0};
  return rec;
}

Verdict point_stability_oracle(const ReducedState& x0, const SwingParams& sp,
                               const OracleOptions& opts) {
  const EquilibriumPair eq = equilibria(sp, 0);
  Classifier cls(eq.delta_sep, opts.settle_tol, opts.settle_dwell,
                 opts.omega_divergence_bound);
  ReducedState x = x0;
  const long n = static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-9));
  if (auto v = cls.update(0.0, x.delta, x.omega)) return *v;
  for (long i = 1; i <= n; ++i) {
    x = rk4_reduced(x, opts.dt, sp);
    if (!std::isfinite(x.delta) || !std::isfinite(x.omega)) {
      return Verdict{VerdictKind::kUnstable, 0};
    }
    if (auto v = cls.update(static_cast<double>(i) * opts.dt, x.delta, x.omega)) return *v;
  }
  return Verdict{VerdictKind::kUndetermined, 0};
}

PllState fault_on_state(const Scenario& sc, double duration) {
  const NetworkEquivalents pre = network_equivalents(sc.params, false);
  const NetworkEquivalents fault = network_equivalents(sc.params, true);
  return integrate(pre_fault_sep(pre, sc.params), 0.0, duration, sc.dt, fault, sc.params);
}

ReducedState clearing_state(const Scenario& sc, double duration) {
  const NetworkEquivalents pre = network_equivalents(sc.params, false);
  return to_reduced(fault_on_state(sc, duration), pre, sc.params);
}

namespace {

// First-flip search shared by real and estimated CCT. `ok(d)` is the stable
// predicate for fault duration d.
template <typename Pred>
CctResult first_flip(Pred ok, double max_duration, const CctOptions& opts) {
  if (!ok(0.0)) return {CctStatus::kAlwaysUnstable, 0.0};
  double lo = 0.0;
  double hi = -1.0;
  const long n = static_cast<long>(std::floor(max_duration / opts.scan_step + 1e-9));
  for (long i = 1; i <= n; ++i) {
    const double d = static_cast<double>(i) * opts.scan_step;
    if (ok(d)) {
      lo = d;
    } else {
      hi = d;
      break;
    }
  }
  if (hi < 0.0) return {CctStatus::kAlwaysStable, lo};
  while (hi - lo > opts.tolerance * (1.0 + 1e-9)) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {CctStatus::kOk, lo};
}

}  // namespace

CctResult real_cct(const Scenario& tmpl, double rf_ohm, const CctOptions& opts) {
  Scenario sc = tmpl;
  sc.params.r_f_ohm = rf_ohm;
  validate(sc.params, true);
  const double max_d = opts.max_duration > 0.0 ? opts.max_duration : sc.t_end - sc.t_fault;
  SimOptions so;
  so.record_samples = false;
  auto ok = [&](double d) {
    Scenario s = sc;
    s.t_clear = sc.t_fault + d;
    s.t_end = std::max(sc.t_end, s.t_clear);
    return simulate(s, nullptr, so).verdict.stable();
  };
  return first_flip(ok, max_d, opts);
}

CctResult estimate_cct(const Scenario& tmpl, const StabilityJudge& judge,
                       JudgeInstant instant, const CctOptions& opts) {
  validate(tmpl.params, true);
  const double max_d = opts.max_duration > 0.0 ? opts.max_duration : tmpl.t_end - tmpl.t_fault;
  auto ok = [&](double d) {
    if (instant == JudgeInstant::kClearing) return judge(clearing_state(tmpl, d));
    Scenario s = tmpl;
    s.t_clear = tmpl.t_fault + d;
    s.t_end = std::max(tmpl.t_end, s.t_clear);
    SimOptions so;
    so.record_samples = false;
    so.stop_on_verdict = false;
    so.stop_at_lvrt_exit = true;
    const TrajectoryRecord r = simulate(s, nullptr, so);
    return r.lvrt_exit_state.has_value() && judge(*r.lvrt_exit_state);
  };
  return first_flip(ok, max_d, opts);
}

}  // namespace pllstab
