#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pllstab/dynsim.hpp"
#include "pllstab/lyap_ablm.hpp"
#include "pllstab/lyap_atrm.hpp"
#include "pllstab/lyap_zubov.hpp"
#include "pllstab/reset_ctl.hpp"
#include "pllstab/sd_trm.hpp"

namespace pllstab {

enum class ResetJudgeKind { kNone, kAblm, kZubov, kAtrm };

struct ResetConfig {
  ResetMode mode = ResetMode::kOmegaReset;
  double omega_target = -2.0 * 3.14159265358979323846;
  int max_resets = 1;
  ResetJudgeKind judge = ResetJudgeKind::kZubov;
};

/// Everything a CLI run needs; defaults are the test-system values.
struct RunConfig {
  double f0 = 50.0;
  Scenario scenario;
  ZubovOptions zubov;
  AtrmOptions atrm;
  AblmPath ablm = AblmPath::kRay;
  ResetConfig reset;
};

/// Parses INI-style text: [section] headers, `key = value`, `#` comments.
/// Throws ConfigError carrying the offending line number.
RunConfig parse_config(const std::string& text);

/// Reads and parses a file; an empty path gives the defaults.
RunConfig load_config(const std::string& path);

/// Writes every key in a form parse_config accepts.
std::string serialize_config(const RunConfig& cfg);

/// Nine significant digits, the format of every CSV float.
std::string fmt9(double v);

/// Columns: t,delta,omega,freq_hz,u_cq,u_c_mag,event. Events at a sample's
/// time are joined with ';'.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec, double f0);

/// Columns: uep_branch,side,index,delta,omega.
void write_curves_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves);

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<ReducedState> points;
};

/// Standalone SVG phase-plane plot: one polyline per series, axis ticks and
/// a legend. Byte-deterministic for fixed input. Throws
/// WindowTooSmallError on an empty window.
std::string emit_svg(const std::vector<SvgSeries>& series, const Window& window,
                     const std::string& title = "");

}  // namespace pllstab
