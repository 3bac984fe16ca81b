#pragma once

#include <complex>
#include <map>
#include <vector>

#include "nhee/correlation.hpp"

namespace nhee {

// Complex principal logarithm with the fixed convention log(-x) = log x + i*pi
// for real negative arguments (signed zeros in the imaginary part are
// normalized away first).  All entropy branches in this library go through
// this function.
cdouble principal_log(cdouble z);

// Von Neumann entropy sum_i [-p log p - (1-p) log(1-p)] over the occupation
// spectrum, principal branch per term; a factor with |p| or |1-p| below
// 1e-300 contributes zero (x log x -> 0).
cdouble von_neumann_entropy(const Eigen::VectorXcd& ps);

// Pair-aware evaluation: within a conjugate pair of exactly-real values
// (a collapsed pair, PT-symmetric spectra produce them as twofold-degenerate
// states) the two members take opposite branch signs at the log cut, which
// realizes the symmetric limit where their i*pi terms cancel.  Off-cut values
// are evaluated exactly as in the plain overload, so genuine complex-pair
// residues remain visible.
cdouble von_neumann_entropy(const OccupationSpectrum& ps);

// n-th Renyi entropy (1-n)^{-1} sum_i log(p^n + (1-p)^n), n >= 2, principal
// branch per term.  Terms are scaled by max(|p|,|1-p|)^n before the log so
// large-|p| spectra cannot overflow.
cdouble renyi_entropy(const Eigen::VectorXcd& ps, int n);

// Free-boson analogue (n-1)^{-1} sum_i log(p^n - (p-1)^n).  Physical boson
// occupancies are p = 1 + nu, nu >= 0; anything else sets nonphysical
// (flagging, not an error; the branch convention stays deterministic there).
struct BosonRenyi {
  cdouble value;
  bool nonphysical = false;
};
BosonRenyi boson_renyi_entropy(const Eigen::VectorXcd& ps, int n);

// Diagnostic decomposition of a single divergent eigenvalue's von Neumann
// contribution: for p ~ c L^nu the exact real part approaches
// -nu log L - log c - 1 (the -1 is the O(1) constant of
// -p log p + (p-1) log(p-1) = -log p - 1 + O(1/p)).
struct ContributionDiagnostic {
  cdouble exact;
  double asymptotic_real = 0.0;
  double asymptotic_imag = 0.0;  // pi * Re(p) to leading order
  bool in_regime = false;        // |p| > 2 and not a real occupation in (0,1)
};
ContributionDiagnostic eigenvalue_contribution(cdouble p, double L, double nu);

// max_i min_j |p_j - conj(p_i)| / max(1, |p_i|); zero for spectra closed
// under conjugation.
double pt_pairing_residual(const Eigen::VectorXcd& ps);

// ---------------------------------------------------------------------------
// Bundled report
// ---------------------------------------------------------------------------

struct EntropyReport {
  cdouble s_von_neumann{0.0, 0.0};
  std::map<int, cdouble> renyi;       // order n -> S_A^{(n)}
  double pt_imag_residual = 0.0;      // max over S and Renyi of |Im|/(|Re|+1)
  std::vector<cdouble> contributions; // per-p_i von Neumann terms
};

EntropyReport entropy_report(const OccupationSpectrum& ps, const std::vector<int>& renyi_orders);

}  // namespace nhee
