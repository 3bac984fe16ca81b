#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nhee/correlation.hpp"
#include "nhee/entropy.hpp"
#include "nhee/fit.hpp"

namespace nhee {

// ---------------------------------------------------------------------------
// Entropy-vs-L sweeps
// ---------------------------------------------------------------------------

struct SweepOptions {
  double tie_tol = 1e-12;
  int threads = 0;
};

struct SweepRow {
  int L = 0;
  bool ok = false;
  std::string error;  // per-L failures are recorded here; the sweep continues
  cdouble s{0.0, 0.0};
  std::map<int, cdouble> renyi;
  double max_abs_p = 0.0;
  double pt_imag_residual = 0.0;
  std::vector<double> branch_abs;  // divergent-branch representatives (see hierarchy)
};

// One row per L, deterministic ordering and content for any thread count.
std::vector<SweepRow> sweep_entropy_vs_L(const ModelSpec& spec, const Geometry& g_template,
                                         const std::vector<int>& L_list, double E_F,
                                         const std::vector<int>& renyi_orders,
                                         const SweepOptions& opts = {});

// Even, approximately log-spaced grid in [lo, hi] with at least n points.
std::vector<int> log_spaced_even(int lo, int hi, int n);

// ---------------------------------------------------------------------------
// Scaling fits
// ---------------------------------------------------------------------------

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::vector<double> window;  // L values used
};

// Least squares of Re S_A against ln L over the successful rows.
ScalingFit fit_log_slope(const std::vector<SweepRow>& rows);

// Centered finite differences d(Re S)/d(ln L): pairs (ln L midpoint, slope).
std::vector<std::pair<double, double>> dsdlnl_curve(const std::vector<SweepRow>& rows);

// -ceil((B^2 Ly^2 - 1)/2), the gapless quadratic law coefficient.
double predicted_gapless_slope(int B, int Ly);

// ---------------------------------------------------------------------------
// Occupation hierarchy
// ---------------------------------------------------------------------------

// Divergent p_i branches tracked across L.  Conjugate partners and the
// occupied/unoccupied complements share a magnitude up to O(1/|p|), while
// distinct branches are separated by a factor ~L, so branches are magnitude
// clusters (|p| > 2, split at ratio 10) matched across L by cluster rank.
struct HierarchyReport {
  std::vector<double> exponents;  // fitted nu per branch, descending
  std::vector<double> predicted;  // {(B*Ly-1)/2, (B*Ly-1)/2 - 1, ...} down to > 0
  bool rank_swap_warning = false; // branch count varied across the window
  struct LongRow {
    int L;
    int branch_rank;
    double abs_p;
  };
  std::vector<LongRow> long_rows;
};

HierarchyReport hierarchy_exponents(const ModelSpec& spec, const Geometry& g_template,
                                    const std::vector<int>& L_list, double E_F = 0.0,
                                    const SweepOptions& opts = {});
// Same, reusing sweep rows (criteria sharing one sweep).
HierarchyReport hierarchy_from_rows(const std::vector<SweepRow>& rows, int B, int Ly);

std::vector<double> predicted_hierarchy(int B, int Ly);

// ---------------------------------------------------------------------------
// Gapped regime: S_A ~ -(kappa Ly + xi) ln L and the S_min law
// ---------------------------------------------------------------------------

struct GappedWindows {
  std::vector<int> kappa_L;   // fit window for S vs ln L (L <~ Ly regime)
  std::vector<int> kappa_Ly;  // cylinder lengths for the slope-vs-Ly fit
  std::vector<int> smin_Ly;   // cylinder lengths for the saturation law
  int smin_L = 60;            // L >> Ly sampling point
};

struct GappedScalingResult {
  std::vector<int> ly_values;
  std::vector<ScalingFit> per_ly_fits;
  bool slope_magnitude_monotonic = false;
  double kappa = 0.0;
  double xi = 0.0;
  LinearFit slope_vs_ly;
  std::vector<int> smin_ly;
  std::vector<double> smin_values;
  LinearFit smin_fit;
  double smin_predicted_slope = 0.0;  // -log(a0 / (b0-1)^B)
};

GappedScalingResult gapped_scaling(const TwoBandParams& p, const GappedWindows& w,
                                   double E_F = 0.0, const SweepOptions& opts = {});

// ---------------------------------------------------------------------------
// Bulk-EP dip scan (four-band)
// ---------------------------------------------------------------------------

struct BulkEpRow {
  int L = 0;
  bool ok = false;
  std::string error;
  cdouble s{0.0, 0.0};
  double max_re_p = 0.0;
  double min_re_p = 0.0;
  bool outside_interval = false;  // some Re p_i left [0,1] (tolerance 1e-6)
};

struct BulkEpReport {
  std::vector<BulkEpRow> rows;
  std::optional<int> exit_L;  // first L with Re p outside [0,1]
  std::optional<int> dip_L;   // deepest local minimum of Re S, if any
  bool trend_increasing = false;
};

BulkEpReport bulk_ep_scan(const FourBandParams& p, const Geometry& g_template, double E_F,
                          const std::vector<int>& L_list, const SweepOptions& opts = {});

}  // namespace nhee
