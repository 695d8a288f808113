#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beccert/prawitz.hpp"

namespace beccert {

/// Smallest double x with 1/x <= target in floating point, so the trivial
/// regime [x, inf) is bounded by target without rounding slack.
double trivial_regime_start(double target);

struct OptimizerSettings {
  /// Stop once a full coordinate pass improves D* by less than this
  /// fraction.
  double rel_improvement = 1e-7;
  /// Golden-section bracket width at which a coordinate search stops.
  double coord_tol = 1e-5;
  /// Half-width of each coordinate bracket, relative to the current value.
  double bracket = 0.25;
  int max_passes = 40;
};

struct OptimizeResult {
  double u0 = 0.0;
  double u = 0.0;
  PrawitzResult eval;  ///< evaluation at (u0, u)
  int evaluations = 0;

  double upper() const { return eval.upper(); }
};

/// Derivative-free local minimization of dstar + margin over (U0, U) by
/// alternating golden-section searches, keeping U0 <= U by projection.
/// The result is never worse than the seed.
OptimizeResult optimize_params(const BoundMode& mode, double seed_u0, double seed_u,
                               const PrawitzParams& numerics = {},
                               const OptimizerSettings& settings = {});

/// One optimized bound inside a scan entry.
struct ModeEval {
  std::string label;  ///< "general", "n=8", "tail m=30", ...
  int n = 0;          ///< n for finite i.i.d., m for the tail, 0 otherwise
  double u0 = 0.0;
  double u = 0.0;
  double dstar = 0.0;
  double margin = 0.0;
  double bridge_upper = 0.0;  ///< dstar + margin re-evaluated at bridged_to

  double upper() const { return dstar + margin; }
};

struct ScanEntry {
  double epsilon = 0.0;
  double u0 = 0.0;  ///< parameters of the worst mode
  double u = 0.0;
  double dstar = 0.0;
  double margin = 0.0;
  double bridged_to = 0.0;  ///< left edge of the certified subinterval
  double bridge_upper = 0.0;
  std::string worst;
  std::map<int, ModeEval> n_detail;  ///< finite-n i.i.d. bounds
  std::optional<ModeEval> tail;      ///< uniform bound for n >= tail->n

  double upper() const { return dstar + margin; }
  /// Bound on D over [bridged_to, epsilon] implied by bridging.
  double bridged_bound() const { return epsilon / bridged_to * upper(); }
};

struct SmallEpsWitness {
  double eps_lo = 0.0;
  double at_eps_lo = 0.0;
  int grid_points = 0;
  double grid_max = 0.0;
  bool monotone = false;
  bool passed = false;
};

struct Certificate {
  std::string schema = "v1";
  std::string mode;  ///< "general" or "iid"
  double target = 0.0;
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  int m = 0;  ///< i.i.d. tail threshold, 0 in general mode
  std::vector<ScanEntry> entries;
  std::optional<SmallEpsWitness> small_eps;
  double large_eps_threshold = 0.0;  ///< trivial_regime_start(target)
  double peak_upper = 0.0;
  double peak_epsilon = 0.0;
  double global_bound = 0.0;
  bool stitched = false;
  std::string config;       ///< canonical JSON of the run settings
  std::string fingerprint;  ///< FNV-1a of `config`
};

struct ScanSettings {
  double target = 0.5606;
  double eps_lo = 0.02;
  double eps_hi = trivial_regime_start(0.5606);
  int m = 30;
  /// The i.i.d. tail threshold doubles (up to tail_growth_cap times its
  /// starting value) while the tail bound exceeds tail_headroom * target.
  double tail_headroom = 0.995;
  int tail_growth_cap = 16;
  PrawitzParams numerics{1.0, 1.0};
  OptimizerSettings optimizer;
  int parallelism = 1;
  std::size_t max_entries = 100000;
  /// Called after each accepted entry.
  std::function<void(const ScanEntry&)> progress;

  static ScanSettings general_defaults();
  static ScanSettings iid_defaults();
};

/// A scan could not certify a nonempty left neighbourhood of some epsilon.
class CertificationFailure : public std::runtime_error {
 public:
  CertificationFailure(const std::string& what, ScanEntry entry, Certificate partial)
      : std::runtime_error(what), entry_(std::move(entry)), partial_(std::move(partial)) {}
  const ScanEntry& entry() const { return entry_; }
  const Certificate& partial() const { return partial_; }

 private:
  ScanEntry entry_;
  Certificate partial_;
};

/// Right-to-left walk over [eps_lo, eps_hi]: each optimized D* at eps_k
/// certifies [eps_k * D*/target, eps_k] by the bridging inequality.
Certificate certified_scan_general(const ScanSettings& settings);

/// Same walk with D(eps) = max(finite-n bounds for ceil(1/eps^2) <= n < m',
/// uniform tail bound at m'), m' >= max(m, ceil(1/eps^2)).
Certificate certified_scan_iid(const ScanSettings& settings);

/// Single-epsilon i.i.d. evaluation used by the scan. `warm` seeds each
/// mode (keyed by n; the tail under key 0).
ScanEntry evaluate_iid_point(double epsilon, int m, const std::map<int, std::pair<double, double>>& warm,
                             const ScanSettings& settings);

struct StitchReport {
  bool passed = false;
  bool coverage = false;
  bool soundness = false;
  bool small_eps = false;
  bool large_eps = false;
  double global_bound = 0.0;
  std::vector<std::string> problems;
};

/// Combines the Prawitz segment with the analytic small-eps regime and the
/// trivial regime eps >= 1/target. Fills small_eps, global_bound and
/// stitched on `cert`.
StitchReport stitch_regimes(Certificate& cert);

/// Canonical settings JSON and its FNV-1a fingerprint.
std::string settings_config(const ScanSettings& s, const std::string& mode);
std::string fingerprint(const std::string& text);

}  // namespace beccert
