#include "pllstab/reset_ctl.hpp"

namespace pllstab {

const char* to_string(ResetMode m) {
  switch (m) {
    case ResetMode::kNone: return "none";
    case ResetMode::kOmegaReset: return "omega_reset";
    case ResetMode::kOmegaDeltaReset: return "omega_delta_reset";
  }
  return "?";
}

bool judge_certifies(const ResetJudge& j, const ReducedState& x) {
  return std::visit(
      [&](const auto& c) -> bool {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, std::monostate>) {
          return false;
        } else {
          return judge(c, x);
        }
      },
      j);
}

bool ResetController::on_lvrt_exit(double t, PllState& state, const NetworkEquivalents& ne,
                                   const CircuitParams& p) {
  if (policy_.mode == ResetMode::kNone) return false;
  if (static_cast<int>(events_.size()) >= policy_.max_resets) return false;
  const ReducedState before = to_reduced(state, ne, p);
  if (judge_certifies(policy_.judge, before)) return false;
  if (policy_.mode == ResetMode::kOmegaDeltaReset) state.delta = 0.0;
  state.x_int = policy_.omega_target - p.k_p * u_cq(state.delta, ne, p);
  events_.push_back({t, before, to_reduced(state, ne, p)});
  return true;
}

ResetDemo reset_demo(const Scenario& sc, const ResetPolicy& policy, int record_stride) {
  SimOptions so;
  so.record_stride = record_stride;
  so.stop_on_verdict = false;
  ResetDemo out;
  out.base = simulate(sc, nullptr, so);
  ResetController ctl(policy);
  out.reset = simulate(sc, &ctl, so);
  out.resets = ctl.events();
  return out;
}

}  // namespace pllstab
