#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pllstab/circuit.hpp"

namespace pllstab {

/// PLL state as integrated: angle relative to the grid and PI-integrator
/// output. omega = x_int + k_p * U_cq(delta) is always derived, so a network
/// switch moves omega through the proportional path while x_int stays put.
struct PllState {
  double delta = 0.0;
  double x_int = 0.0;
};

/// Phase-plane state (delta, omega) of the reduced dynamics.
struct ReducedState {
  double delta = 0.0;
  double omega = 0.0;
};

struct SettleTol {
  double delta = 1e-3;
  double omega = 1e-2;
};

struct Scenario {
  CircuitParams params;
  double t_fault = 0.2;
  double t_clear = 0.4235;
  double t_end = 6.0;
  double dt = 1e-4;
  double omega_divergence_bound = 200.0;
  SettleTol settle_tol;
  double settle_dwell = 0.5;
  double lvrt_exit_voltage = 0.9;
};

/// Throws InvalidParameterError on inconsistent timing or circuit data.
void validate(const Scenario& sc);

enum class EventKind { kFaultOn, kFaultClear, kLvrtExit, kReset, kSettled, kDiverged };

const char* to_string(EventKind k);

struct TrajectoryEvent {
  double t = 0.0;
  EventKind kind = EventKind::kFaultOn;
};

struct Sample {
  double t = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double u_cq = 0.0;
  double u_c_mag = 0.0;
};

enum class VerdictKind { kStable, kUnstable, kUndetermined };

struct Verdict {
  VerdictKind kind = VerdictKind::kUndetermined;
  int k = 0;  // SEP branch for kStable
  bool stable() const { return kind == VerdictKind::kStable; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string to_string(const Verdict& v);

struct TrajectoryRecord {
  std::vector<Sample> samples;
  std::vector<TrajectoryEvent> events;
  Verdict verdict;
  std::optional<ReducedState> clear_state;      // just after the clearing switch
  std::optional<ReducedState> lvrt_exit_state;  // before any reset
  bool has_event(EventKind k) const;
};

/// Hook invoked once at the LVRT-exit sample. Implementations may rewrite
/// `state`; returning true records a reset event.
class LvrtExitHandler {
 public:
  virtual ~LvrtExitHandler() = default;
  virtual bool on_lvrt_exit(double t, PllState& state, const NetworkEquivalents& ne,
                            const CircuitParams& p) = 0;
};

struct SimOptions {
  bool record_samples = true;
  int record_stride = 1;
  bool stop_on_verdict = true;
  bool stop_at_lvrt_exit = false;
};

/// q-axis PCC voltage in the PLL frame.
double u_cq(double delta, const NetworkEquivalents& ne, const CircuitParams& p);

/// |U_c|, the PCC voltage magnitude used for the LVRT-exit test.
double u_c_mag(double delta, const NetworkEquivalents& ne, const CircuitParams& p);

/// Reduced vector field: (omega, p_m - p_e sin(delta - theta1) - d_c cos(delta - theta1) omega).
std::pair<double, double> rhs(const ReducedState& x, const SwingParams& sp);

ReducedState to_reduced(const PllState& s, const NetworkEquivalents& ne,
                        const CircuitParams& p);
PllState to_pll(const ReducedState& x, const NetworkEquivalents& ne,
                const CircuitParams& p);

/// Fixed-step RK4 through pre-fault, fault-on and post-fault segments.
/// Throws NumericalFailure on a non-finite state.
TrajectoryRecord simulate(const Scenario& sc, LvrtExitHandler* controller = nullptr,
                          const SimOptions& opts = {});

/// Incremental trajectory classifier: stable(k) after the state stays within
/// settle_tol of SEP k for `dwell` seconds, unstable once |omega| exceeds the
/// bound.
class Classifier {
 public:
  Classifier(double delta_sep, const SettleTol& tol, double dwell, double omega_bound);
  /// Feeds one sample; returns the verdict once decided.
  std::optional<Verdict> update(double t, double delta, double omega);
  /// Forgets any dwell progress (e.g. after a state reset).
  void restart() { settling_ = false; }

 private:
  double delta_sep_;
  SettleTol tol_;
  double dwell_;
  double bound_;
  bool settling_ = false;
  int branch_ = 0;
  double since_ = 0.0;
};

/// Options for the fault-free ground-truth membership test.
struct OracleOptions {
  double dt = 1e-3;
  double t_end = 30.0;
  double omega_divergence_bound = 200.0;
  SettleTol settle_tol;
  double settle_dwell = 0.5;
};

/// Integrates the reduced dynamics from x0 without any fault and classifies
/// the outcome against the SEP family of `sp`.
Verdict point_stability_oracle(const ReducedState& x0, const SwingParams& sp,
                               const OracleOptions& opts = {});

enum class CctStatus { kOk, kAlwaysStable, kAlwaysUnstable };

struct CctResult {
  CctStatus status = CctStatus::kOk;
  double value = 0.0;  // seconds; meaningful for kOk
};

struct CctOptions {
  double scan_step = 1e-3;
  double tolerance = 1e-4;
  double max_duration = -1.0;  // <= 0 means t_end - t_fault
};

/// Critical clearing time by simulation: coarse scan of the fault duration,
/// then bisection. `rf_ohm` overrides the template's fault resistance.
CctResult real_cct(const Scenario& tmpl, double rf_ohm, const CctOptions& opts = {});

/// PLL state at the end of a fault of length `duration` starting from the
/// pre-fault SEP (before the clearing switch).
PllState fault_on_state(const Scenario& sc, double duration);

/// Reduced state just after clearing a fault of length `duration`.
ReducedState clearing_state(const Scenario& sc, double duration);

/// Which state a Lyapunov judge sees when estimating CCT.
enum class JudgeInstant { kClearing, kLvrtExit };

using StabilityJudge = std::function<bool(const ReducedState&)>;

/// CCT estimate from a judge: the largest duration before the judged verdict
/// first flips from stable to unstable.
CctResult estimate_cct(const Scenario& tmpl, const StabilityJudge& judge,
                       JudgeInstant instant = JudgeInstant::kClearing,
                       const CctOptions& opts = {});

}  // namespace pllstab
