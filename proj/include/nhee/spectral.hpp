#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "nhee/fit.hpp"
#include "nhee/models.hpp"

namespace nhee {

// ---------------------------------------------------------------------------
// Dense non-Hermitian eigensolves (LAPACK geev with balancing)
// ---------------------------------------------------------------------------

// Eigenvalues only.  A real-valued input is routed through the real solver,
// so conjugate pairs come out exact.
Eigen::VectorXcd dense_eigenvalues(const Eigen::MatrixXcd& m);
Eigen::VectorXcd dense_eigenvalues_real(const Eigen::MatrixXd& m);

struct DenseEig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // right eigenvectors as columns
};
DenseEig dense_eig(const Eigen::MatrixXcd& m);

// ---------------------------------------------------------------------------
// Biorthogonal eigensystems
// ---------------------------------------------------------------------------

// H = sum_m E_m |psi_m^R><psi_m^L| with <psi_m^L|psi_l^R> = delta_ml.
// Columns of `right` are |psi_m^R>, rows of `left` are <psi_m^L|; by default
// left = right^{-1}, which keeps the biorthonormality exact up to inversion
// error.  Near an exceptional point (u_rcond < defect_tol) the left vectors
// are recomputed from the adjoint problem with eigenvalue pairing and the
// larger of the two residuals is reported.
struct BiorthEigenSystem {
  Eigen::VectorXcd energies;  // sorted by (Re, Im), lexicographic
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  double biorth_residual = 0.0;  // ||left * right - I||_max
  bool near_defective = false;
  double u_rcond = 1.0;  // reciprocal condition estimate of the eigenvector matrix

  int size() const { return int(energies.size()); }
};

BiorthEigenSystem biorth_eig(const Eigen::MatrixXcd& m, double defect_tol = 1e-12);

// Indices m with Re(E_m) < E_F.  A state with |Re E_m - E_F| < tie_tol is an
// ambiguity and raises instead of being silently resolved; the twisted grid
// is designed to avoid such ties.  (The gapless two-band sweeps pass a
// smaller tie_tol because their edge gap at k1 = pi/L is exponentially small
// in B*Ly yet still well resolved; see occupied_indices call sites.)
std::vector<int> occupied_indices(const BiorthEigenSystem& es, double E_F = 0.0,
                                  double tie_tol = 1e-12);

// ---------------------------------------------------------------------------
// Eigenstate overlap diagnostics
// ---------------------------------------------------------------------------

// Normalized squared overlap of two right eigenstates,
//   eta = |<psi_m^R|psi_l^R>|^2 / (<psi_m^R|psi_m^R><psi_l^R|psi_l^R>).
struct OverlapReport {
  double eta = 0.0;
  std::pair<int, int> band_indices{0, 0};
  bool is_edge_pair = false;  // both bands inside the topological region
};

OverlapReport eta_overlap(const BiorthEigenSystem& es, int m, int l,
                          bool is_edge_pair = false);

// The two states straddling E_F (largest Re E below, smallest at/above).
std::pair<int, int> fermi_straddling_pair(const BiorthEigenSystem& es, double E_F = 0.0);

// ---------------------------------------------------------------------------
// Similarity transform to the Hermitian surrogate (two-band, open y)
// ---------------------------------------------------------------------------

struct SurrogateSystem {
  double r = 1.0;                    // r(k) = sqrt|(b0 - cos k)^B / a0|
  Eigen::VectorXd Q_diagonal;        // diag{1, r, r, r^2, ..., r^{Ly-1}, r^{Ly-1}, r^{Ly}}
  Eigen::MatrixXcd surrogate;        // H'(k) = Q^{-1} H Q
  double spectrum_residual = 0.0;    // Hausdorff distance of eigenvalue multisets
};

SurrogateSystem surrogate_transform(const TwoBandParams& p, const Geometry& g, double k);

// ---------------------------------------------------------------------------
// Edge-state gap
// ---------------------------------------------------------------------------

// Numeric gap 2|E_{e1}| from the two mid-spectrum states (e1 = the occupied
// one).  Validity of the edge-state interpretation is the caller's business;
// edge_gap_prediction performs the topological-region check.
double edge_gap(const BiorthEigenSystem& es);

// (a0 (b0 - cos k)^B / t^2)^{Ly/2}; asymptotic in Ly, unknown prefactor, so
// contracts are on the log-slope in Ly only.
double edge_gap_prediction(const TwoBandParams& p, double k, int Ly);

// ---------------------------------------------------------------------------
// EP dispersion classification (four-band family)
// ---------------------------------------------------------------------------

enum class EpDispersionKind { linear_det, quadratic_det };

struct EpClassification {
  EpDispersionKind kind = EpDispersionKind::linear_det;
  double exponent = 0.0;  // fitted d log|det H(dk)| / d log dk
  LinearFit fit;
  bool schur_checked = false;    // analytic det(R) iteration ran (alpha = 0 only)
  bool det_R_vanishes = false;   // det(R) -> 0 as dk -> 0  <=>  quadratic case
};

// Fits log|det H_ribbon(dk)| against log dk over dk in [1e-4, 1e-2] after
// verifying an EP at k = 0 by a gap scan.  Exponent outside [0.8, 2.2] is a
// classification failure carrying the raw fit.
EpClassification ep_dispersion_classify(const FourBandParams& p, const Geometry& g);

struct classification_error : solver_error {
  LinearFit fit;
  classification_error(const std::string& msg, const LinearFit& f)
      : solver_error(msg), fit(f) {}
};

// ---------------------------------------------------------------------------
// Real spectral projector (two-band fast path)
// ---------------------------------------------------------------------------

// Projector onto the invariant subspace of a real matrix spanned by the
// eigenvectors with Re E < E_F, computed in real arithmetic (the occupied set
// of a real matrix is closed under conjugation, so the projector is real).
Eigen::MatrixXd real_occupied_projector(const Eigen::MatrixXd& h, double E_F,
                                        double tie_tol = 1e-12);

}  // namespace nhee
