#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "nhee/spectral.hpp"

namespace nhee {

// Exact many-body verification on tiny lattices.  Mode ordering convention:
// mode i is bit i, basis state |x> = c_{i1}^dag c_{i2}^dag ... |0> with
// i1 < i2 < ... applied leftmost-first, and the subregion-A modes occupy the
// lowest bit positions.  With A first, |x> factorizes as C_A(a)^dag C_B(b)^dag |0>,
// which is what makes the naive partial trace and the sign-free two-copy swap
// exact for particle-number conserving states.

struct FockState {
  Eigen::VectorXcd amplitudes;  // length 2^mode_count
  int mode_count = 0;
  int a_modes = 0;  // number of subregion modes (lowest bits)
};

struct ManyBodyPair {
  FockState right;  // |Psi^R>
  FockState left;   // |Psi^L> as a ket; bra components are its conjugates
  double overlap_residual = 0.0;  // |<Psi^L|Psi^R> - 1| before normalization
};

// |Psi^R> = prod_{m in occ} (psi_m^R)^dag |0> from the columns of U, left
// state from the rows of U^{-1}, applied in fixed ascending m order; the
// subset a_modes is permuted to the front (a pure relabeling of modes).
// <Psi^L|Psi^R> is normalized to 1; a pre-normalization overlap magnitude
// below 1e-12 signals a degenerate occupied set and raises.
ManyBodyPair build_manybody_states(const BiorthEigenSystem& es, const std::vector<int>& occ,
                                   const std::vector<int>& a_modes);

struct ReducedDensity {
  Eigen::MatrixXcd matrix;  // 2^{N_A} square
  double trace_residual = 0.0;
};

ReducedDensity reduced_density_matrix(const FockState& right, const FockState& left);

struct ExactEntropies {
  cdouble von_neumann{0.0, 0.0};
  std::map<int, cdouble> renyi;
};

// Von Neumann from the eigenvalues of rho_A (the geev values are the Schur
// diagonal, so near-defective rho_A needs no separate fallback), Renyi from
// traces of matrix powers.
ExactEntropies exact_entropies(const ReducedDensity& rd, const std::vector<int>& n_list);

// <Psi^L| x <Psi^L| SWAP_A |Psi^R> x |Psi^R> on the two-copy space; equals
// Tr(rho_A^2) = e^{-S_A^{(2)}}.  Refuses when 2*mode_count > 20.
cdouble swap_expectation(const FockState& right, const FockState& left);

// ---------------------------------------------------------------------------
// Oracle suite: correlation-method entropies against the exact Fock values
// ---------------------------------------------------------------------------

struct OracleRow {
  std::string label;
  int modes = 0;
  cdouble s_corr, s_exact;
  cdouble s2_corr, s2_exact;
  cdouble s3_corr, s3_exact;
  double s_diff = 0.0, s2_diff = 0.0, s3_diff = 0.0;
  bool swap_checked = false;
  cdouble swap_value{0.0, 0.0};
  double swap_diff = 0.0;        // |swap - Tr(rho_A^2)|
  double overlap_residual = 0.0;
  bool pass = false;  // all residuals < 1e-8
};

// Randomized small instances of both models (Hermitian and non-Hermitian
// parameters), half cut, E_F = 0.  Deterministic for a fixed seed.
std::vector<OracleRow> run_oracle_suite(int n_instances, unsigned seed = 20240901);

}  // namespace nhee
