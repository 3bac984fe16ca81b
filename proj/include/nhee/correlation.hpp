#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "nhee/spectral.hpp"

namespace nhee {

// ---------------------------------------------------------------------------
// Occupied-band projector P(k)
// ---------------------------------------------------------------------------

struct BandProjector {
  double k = 0.0;
  Eigen::MatrixXcd matrix;  // sum_{m in occ} |psi_m^R><psi_m^L|
};

Eigen::MatrixXcd band_projector(const BiorthEigenSystem& es, const std::vector<int>& occ);

// Generic small-instance truncation: P restricted to an arbitrary mode subset.
Eigen::MatrixXcd projector_truncation(const BiorthEigenSystem& es, const std::vector<int>& occ,
                                      const std::vector<int>& a_modes);

// ---------------------------------------------------------------------------
// Real-space truncated projector P-bar over subregion A
// ---------------------------------------------------------------------------

struct CorrelationOptions {
  int subregion_cells = 0;    // 0 -> L/2; L -> full system (test/diagnostic builds)
  double tie_tol = 1e-12;     // occupation tie tolerance at E_F
  int threads = 0;            // 0 -> hardware concurrency; per-k work only
  bool force_complex = false; // bypass the two-band real fast path (cross-checks)
};

// Dense P-bar with the block layout of the paper: row index
// ((y*n_orb + s) * cells + x), so P-bar^{s1,s2}_{y1,y2} is a cells x cells
// submatrix.  Elements are exact discrete Fourier sums over the L twisted
// momenta; is_real marks the two-band path where the sum is a real cosine
// sum by the exact k -> -k symmetry of the ribbon.
struct TruncatedProjector {
  Eigen::MatrixXcd matrix;
  int L = 0;
  int Ly = 0;
  int n_orb = 0;
  int cells = 0;      // x-extent of subregion A
  bool is_real = false;

  int dim() const { return n_orb * Ly * cells; }
  // block view over (y, s) in 0-based indices, s in [0, n_orb)
  Eigen::Block<const Eigen::MatrixXcd> block(int y1, int s1, int y2, int s2) const {
    return matrix.block((y1 * n_orb + s1) * cells, (y2 * n_orb + s2) * cells, cells, cells);
  }
};

TruncatedProjector truncated_projector(const ModelSpec& spec, const Geometry& g,
                                       double E_F = 0.0,
                                       const CorrelationOptions& opts = {});

// ---------------------------------------------------------------------------
// Occupation spectrum {p_i} of P-bar
// ---------------------------------------------------------------------------

// Eigenvalues of the (generally non-normal) truncated projector, balanced
// solver, sorted by descending |p|.  pair_map[i] is the index of the nearest
// conjugate partner within 1e-6 * max(1, |p_i|), or -1; for real-parameter
// two-band models the multiset is closed under conjugation.
struct OccupationSpectrum {
  Eigen::VectorXcd values;
  std::vector<int> pair_map;
  double max_abs = 0.0;
};

OccupationSpectrum occupation_spectrum(const TruncatedProjector& tp);
OccupationSpectrum occupation_spectrum(const Eigen::MatrixXcd& pbar, bool is_real = false);

// ---------------------------------------------------------------------------
// Asymptotic edge-state projector (diagnostic)
// ---------------------------------------------------------------------------

// Rank-one skin-localized pattern |psi_e1^R><psi_e1^L| built from the r(k),
// eps(k) powers of the similarity transform, compared against the full P(k).
// Shape comparison only (elementwise magnitudes): the pattern is defined up
// to normalization and does not track the zero mode's sign alternation.
struct EdgeProjectorReport {
  Eigen::MatrixXcd pattern;          // normalized so <psi^L|psi^R> = 1
  double dominance_ratio = 0.0;      // || |P| - |P_edge| ||_max / ||P||_max
  std::array<int, 2> max_element_row{0, 0};  // {y, s} of the largest |P| element
  std::array<int, 2> max_element_col{0, 0};
};

EdgeProjectorReport edge_projector_approx(const TwoBandParams& p, const Geometry& g, double k);

// Overflow guard documented by the correlation module: configurations whose
// dominant-block log-magnitude estimate exceeds double range are refused.
void check_overflow_guard(const ModelSpec& spec, const Geometry& g);

}  // namespace nhee
