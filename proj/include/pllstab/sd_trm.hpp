#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pllstab/circuit.hpp"
#include "pllstab/dynsim.hpp"

namespace pllstab {

/// Axis-aligned phase-plane box in absolute coordinates.
struct Window {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double omega_min = -40.0;
  double omega_max = 40.0;
  bool contains(double d, double w) const {
    return d >= delta_min && d <= delta_max && w >= omega_min && w <= omega_max;
  }
};

/// Default tracing window: delta within 3*pi of the k = 0 SEP, |omega| <= 40.
Window default_window(const SwingParams& sp);

enum class Side { kLeft, kRight };
enum class Termination { kWindowExit, kTimeBudget };

const char* to_string(Side s);

/// One branch of a UEP's stable manifold, traced by reversed-time integration.
struct BoundaryCurve {
  int uep_branch = 0;
  Side side = Side::kLeft;
  std::vector<ReducedState> points;
  Termination terminated_by = Termination::kWindowExit;
};

struct TraceOptions {
  double eps_seed = 1e-5;
  double ds_max = 0.02;
  double h_max = 1e-3;       // reversed-time step cap
  double time_budget = 40.0;  // reversed seconds per branch
};

/// Traces both stable-manifold branches of every UEP with branch index in
/// [k_min, k_max]. Throws NotASaddleError if the Jacobian at a UEP has no
/// real eigenvalue of each sign.
std::vector<BoundaryCurve> trm_boundary(const SwingParams& sp, int k_min, int k_max,
                                        const Window& window, const TraceOptions& opts = {});

/// Raster labeling of the window by the SEP whose stability domain contains
/// each cell; the traced curves act as walls. Used for geometric membership
/// and band checks.
class SdRaster {
 public:
  SdRaster(const std::vector<BoundaryCurve>& curves, const SwingParams& sp,
           const Window& window, int nx = 1200, int ny = 1200);

  /// SEP branch whose region holds the point; nullopt for wall cells,
  /// unreached cells and points outside the window.
  std::optional<int> label(double delta, double omega) const;

  /// True when some raster row spans a full 2*pi period with every cell
  /// labeled (walls allowed), i.e. the curves leave a common horizontal band.
  bool has_covered_row() const;

  /// Distance in the phase plane from (delta, omega) to the nearest curve point.
  double distance_to_curves(double delta, double omega) const;

 private:
  int cell_x(double d) const;
  int cell_y(double w) const;

  Window window_;
  int nx_, ny_;
  double period_;
  std::vector<int> labels_;  // -1 unreached, -2 wall, otherwise k + offset
  int offset_ = 1000;
  std::vector<ReducedState> all_points_;
};

enum class SdFormKind { kOverlappingBand, kPartialOverlap, kDisjoint };

const char* to_string(SdFormKind k);

struct SdForm {
  SdFormKind form = SdFormKind::kDisjoint;
  std::optional<double> omega_cr;          // top of the band below the SEPs
  std::vector<double> band_levels;          // every omega level judged safe
  std::optional<double> recommended_level;  // band level with margin on both sides
};

struct ProbeOptions {
  double level_step = 0.25;
  int delta_points = 64;
  double separatrix_offset = 1e-2;  // re-probe distance for escaping probes
  OracleOptions oracle;
};

/// Scans omega levels across the curves' omega range. A level is in the band
/// when the simulation oracle reports stable (any SEP) for every probe angle
/// over one period. An escaping probe whose two neighbors at
/// +-separatrix_offset settle on different SEPs counts as a separatrix hit
/// and does not break the level. Throws ClassificationInconclusiveError when an
/// undetermined probe decides a level.
SdForm classify_sd_form(const std::vector<BoundaryCurve>& curves, const SwingParams& sp,
                        const ProbeOptions& opts = {});

enum class SweepParam { kKi, kKp, kIcd };

const char* to_string(SweepParam p);

struct SweepEntry {
  double value = 0.0;
  std::vector<BoundaryCurve> curves;
  std::optional<std::string> error;  // set when the value has no equilibrium
};

/// Traces the unfaulted-network boundary for each parameter value. kIcd sets
/// i_c to the value with phi_i = 0 (pure d-axis current).
std::vector<SweepEntry> sweep_parameter(const CircuitParams& base, SweepParam param,
                                        const std::vector<double>& values, int k_min = -2,
                                        int k_max = 1, const TraceOptions& opts = {});

/// Bounding box of the boundary of the k = 0 SEP's domain (curves of UEP
/// branches -1 and 0) within the window.
struct SdExtent {
  double delta_min = 0.0, delta_max = 0.0;
  double omega_min = 0.0, omega_max = 0.0;
};

SdExtent sd_extent(const std::vector<BoundaryCurve>& curves);

}  // namespace pllstab
