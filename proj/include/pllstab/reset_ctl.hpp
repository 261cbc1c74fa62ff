#pragma once

#include <variant>
#include <vector>

#include "pllstab/dynsim.hpp"
#include "pllstab/lyap_ablm.hpp"
#include "pllstab/lyap_atrm.hpp"
#include "pllstab/lyap_zubov.hpp"

namespace pllstab {

enum class ResetMode { kNone, kOmegaReset, kOmegaDeltaReset };

const char* to_string(ResetMode m);

/// Optional certificate consulted at LVRT exit; monostate means "always reset".
using ResetJudge = std::variant<std::monostate, AblmCertificate, ZubovCertificate, AtrmCertificate>;

struct ResetPolicy {
  ResetMode mode = ResetMode::kOmegaReset;
  double omega_target = -2.0 * 3.14159265358979323846;
  ResetJudge judge;
  int max_resets = 1;
};

struct ResetEvent {
  double t = 0.0;
  ReducedState before;
  ReducedState after;
};

/// Rewrites the PLL state at LVRT exit: omega is set to the target through
/// the integrator (x_int = target - k_p U_cq(delta)); the omega-delta mode
/// first moves delta to 0. A judge that certifies the exit state as stable
/// suppresses the reset.
class ResetController : public LvrtExitHandler {
 public:
  explicit ResetController(ResetPolicy policy) : policy_(std::move(policy)) {}
  bool on_lvrt_exit(double t, PllState& state, const NetworkEquivalents& ne,
                    const CircuitParams& p) override;
  const std::vector<ResetEvent>& events() const { return events_; }

 private:
  ResetPolicy policy_;
  std::vector<ResetEvent> events_;
};

/// True when the judge certifies x; false for an empty judge.
bool judge_certifies(const ResetJudge& j, const ReducedState& x);

struct ResetDemo {
  TrajectoryRecord base;   // no controller
  TrajectoryRecord reset;  // with the policy
  std::vector<ResetEvent> resets;
};

/// Runs the scenario twice, without and with the policy, recording samples
/// and continuing to t_end after a verdict.
ResetDemo reset_demo(const Scenario& sc, const ResetPolicy& policy, int record_stride = 10);

}  // namespace pllstab
