#include "nhee/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

namespace nhee {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

lapack_complex_double* lp(cdouble* p) { return reinterpret_cast<lapack_complex_double*>(p); }

[[noreturn]] void throw_eig_failure(int info, int n, double norm_max) {
  throw solver_error("eigensolver failure (geev info=" + std::to_string(info) +
                     ", size=" + std::to_string(n) +
                     ", ||M||_max=" + std::to_string(norm_max) + ")");
}

struct RealEig {
  VectorXd wr, wi;
  MatrixXd vr;  // LAPACK-packed real basis (pair j,j+1 holds Re, Im of the eigenvector)
};

RealEig dgeev_full(const MatrixXd& m, bool vectors) {
  const int n = int(m.rows());
  MatrixXd a = m;
  RealEig out;
  out.wr.resize(n);
  out.wi.resize(n);
  if (vectors) out.vr.resize(n, n);
  const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(),
                                 n, out.wr.data(), out.wi.data(), nullptr, std::max(1, n),
                                 vectors ? out.vr.data() : nullptr, std::max(1, n));
  if (info != 0) throw_eig_failure(info, n, m.cwiseAbs().maxCoeff());
  return out;
}

}  // namespace

Eigen::VectorXcd dense_eigenvalues_real(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw config_error("dense_eigenvalues: matrix must be square");
  const RealEig e = dgeev_full(m, false);
  VectorXcd w(m.rows());
  for (int i = 0; i < m.rows(); ++i) w[i] = cdouble(e.wr[i], e.wi[i]);
  return w;
}

Eigen::VectorXcd dense_eigenvalues(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw config_error("dense_eigenvalues: matrix must be square");
  const int n = int(m.rows());
  if (n == 0) return VectorXcd();
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) return dense_eigenvalues_real(m.real());
  MatrixXcd a = m;
  VectorXcd w(n);
  const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, lp(a.data()), n,
                                 lp(w.data()), nullptr, std::max(1, n), nullptr,
                                 std::max(1, n));
  if (info != 0) throw_eig_failure(info, n, m.cwiseAbs().maxCoeff());
  return w;
}

DenseEig dense_eig(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw config_error("dense_eig: matrix must be square");
  const int n = int(m.rows());
  DenseEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  if (n == 0) return out;
  MatrixXcd a = m;
  const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, lp(a.data()), n,
                                 lp(out.values.data()), nullptr, std::max(1, n),
                                 lp(out.vectors.data()), std::max(1, n));
  if (info != 0) throw_eig_failure(info, n, m.cwiseAbs().maxCoeff());
  return out;
}

BiorthEigenSystem biorth_eig(const Eigen::MatrixXcd& m, double defect_tol) {
  if (m.rows() != m.cols()) throw config_error("biorth_eig: matrix must be square");
  if (!m.allFinite()) throw config_error("biorth_eig: matrix has non-finite entries");
  const int n = int(m.rows());
  DenseEig e = dense_eig(m);

  // deterministic ordering: (Re E, Im E) lexicographic
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (e.values[a].real() != e.values[b].real())
      return e.values[a].real() < e.values[b].real();
    return e.values[a].imag() < e.values[b].imag();
  });

  BiorthEigenSystem es;
  es.energies.resize(n);
  es.right.resize(n, n);
  for (int i = 0; i < n; ++i) {
    es.energies[i] = e.values[order[i]];
    es.right.col(i) = e.vectors.col(order[i]);
  }

  Eigen::PartialPivLU<MatrixXcd> lu(es.right);
  es.left = lu.inverse();
  es.u_rcond = 1.0 / std::max(1.0, es.right.cwiseAbs().colwise().sum().maxCoeff() *
                                       es.left.cwiseAbs().colwise().sum().maxCoeff());
  es.biorth_residual =
      (es.left * es.right - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  es.near_defective = es.u_rcond < defect_tol;

  if (es.near_defective) {
    // adjoint-problem fallback: right eigenvectors of M^dagger give the left
    // eigenvectors of M after pairing eigenvalues E_m <-> conj(mu_j)
    DenseEig adj = dense_eig(m.adjoint());
    MatrixXcd left_adj(n, n);
    std::vector<bool> used(n, false);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      int best = -1;
      double best_d = 0.0;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double d = std::abs(std::conj(adj.values[j]) - es.energies[i]);
        if (best < 0 || d < best_d) {
          best = j;
          best_d = d;
        }
      }
      used[best] = true;
      Eigen::RowVectorXcd row = adj.vectors.col(best).adjoint();
      const cdouble denom = row * es.right.col(i);
      if (std::abs(denom) < 1e-300) {
        ok = false;  // defective pair; keep the inversion-based row
        break;
      }
      left_adj.row(i) = row / denom;
    }
    if (ok) {
      const double res_adj =
          (left_adj * es.right - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
      es.left = left_adj;
      es.biorth_residual = std::max(es.biorth_residual, res_adj);
    }
  }
  // the residual contract (< 1e-10) only holds while the flag is unset, so a
  // merely ill-conditioned system that misses it is flagged as well
  if (es.biorth_residual >= 1e-10) es.near_defective = true;
  return es;
}

std::vector<int> occupied_indices(const BiorthEigenSystem& es, double E_F, double tie_tol) {
  std::vector<int> occ;
  for (int i = 0; i < es.size(); ++i) {
    const double d = es.energies[i].real() - E_F;
    if (std::abs(d) < tie_tol)
      throw numeric_refusal("occupation tie at E_F: |Re E - E_F| = " + std::to_string(std::abs(d)) +
                            " < " + std::to_string(tie_tol) + " (E_F = " + std::to_string(E_F) + ")");
    if (d < 0.0) occ.push_back(i);
  }
  return occ;
}

OverlapReport eta_overlap(const BiorthEigenSystem& es, int m, int l, bool is_edge_pair) {
  if (m == l) throw config_error("eta_overlap: band indices must differ");
  const VectorXcd um = es.right.col(m), ul = es.right.col(l);
  const double nm = um.squaredNorm(), nl = ul.squaredNorm();
  if (nm == 0.0 || nl == 0.0) throw solver_error("eta_overlap: zero-norm eigenvector column");
  OverlapReport rep;
  rep.eta = std::norm(cdouble(um.dot(ul))) / (nm * nl);
  rep.band_indices = {m, l};
  rep.is_edge_pair = is_edge_pair;
  return rep;
}

std::pair<int, int> fermi_straddling_pair(const BiorthEigenSystem& es, double E_F) {
  int below = -1, above = -1;
  for (int i = 0; i < es.size(); ++i) {
    if (es.energies[i].real() < E_F) below = i;  // energies sorted by Re
    else if (above < 0) above = i;
  }
  if (below < 0 || above < 0)
    throw not_applicable_error("fermi_straddling_pair: E_F outside the spectrum");
  return {below, above};
}

SurrogateSystem surrogate_transform(const TwoBandParams& p, const Geometry& g, double k) {
  p.validate();
  if (g.y_boundary != YBoundary::open)
    throw config_error("surrogate transform is defined for the open y-boundary");
  const double b = two_band_offdiag(p, k);
  if (b == 0.0)
    throw numeric_refusal("surrogate transform singular: r(k) = 0 at the nHCSC critical point");
  SurrogateSystem s;
  s.r = std::sqrt(std::abs(b / p.a0));
  const double log_rly = double(g.Ly) * std::log(s.r);
  if (std::abs(log_rly) > 650.0)
    throw numeric_refusal("surrogate transform: r^Ly leaves double range, Ly*log r = " +
                          std::to_string(log_rly));
  const int dim = 2 * g.Ly;
  s.Q_diagonal.resize(dim);
  for (int y = 0; y < g.Ly; ++y) {
    s.Q_diagonal[2 * y] = std::pow(s.r, y);
    s.Q_diagonal[2 * y + 1] = std::pow(s.r, y + 1);
  }
  const MatrixXd h = ribbon_two_band_real(p, g, k);
  MatrixXd hp(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) hp(i, j) = h(i, j) * s.Q_diagonal[j] / s.Q_diagonal[i];
  s.surrogate = hp.cast<cdouble>();

  const VectorXcd ev_h = dense_eigenvalues_real(h);
  const VectorXcd ev_s = dense_eigenvalues_real(hp);
  double haus = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXcd& a = pass == 0 ? ev_h : ev_s;
    const VectorXcd& bb = pass == 0 ? ev_s : ev_h;
    for (int i = 0; i < a.size(); ++i) {
      double dmin = std::abs(a[i] - bb[0]);
      for (int j = 1; j < bb.size(); ++j) dmin = std::min(dmin, std::abs(a[i] - bb[j]));
      haus = std::max(haus, dmin);
    }
  }
  s.spectrum_residual = haus;
  return s;
}

double edge_gap(const BiorthEigenSystem& es) {
  const int n = es.size();
  if (n < 2) throw config_error("edge_gap: need at least two states");
  return 2.0 * std::abs(es.energies[n / 2 - 1]);
}

double edge_gap_prediction(const TwoBandParams& p, double k, int Ly) {
  if (!topo_region_indicator(p, k))
    throw not_applicable_error("edge_gap_prediction: k outside the topological region");
  const double base = std::abs(p.a0 * two_band_offdiag(p, k)) / (p.t * p.t);
  return std::pow(base, 0.5 * double(Ly));
}

EpClassification ep_dispersion_classify(const FourBandParams& p, const Geometry& g) {
  if (g.y_boundary != YBoundary::open)
    throw config_error("EP dispersion classification requires the open y-boundary");
  const ModelSpec spec{p};

  // gap scan: an EP at k = 0 needs det H(0) = 0 AND coalescing eigenvectors.
  // The determinant is compared against a reference k because a defective
  // zero splits into a rounding ring of radius ~eps^{1/m}; the overlap factor
  // separates an exceptional crossing from an ordinary (Hermitian-like) one.
  {
    const MatrixXcd h0 = ribbon_hamiltonian(spec, g, 0.0).entries;
    const MatrixXcd href = ribbon_hamiltonian(spec, g, 0.5).entries;
    const double det0 = std::abs(Eigen::PartialPivLU<MatrixXcd>(h0).determinant());
    const double detr = std::abs(Eigen::PartialPivLU<MatrixXcd>(href).determinant());
    if (!(det0 < 1e-4 * detr))
      throw solver_error("ep_dispersion_classify: no EP at k = 0 (no gapless point, "
                         "|det H(0)| / |det H(0.5)| = " +
                         std::to_string(detr > 0 ? det0 / detr : 0.0) + ")");
    const BiorthEigenSystem es0 = biorth_eig(h0);
    int i0 = 0, i1 = 1;
    double m0 = 1e300, m1 = 1e300;
    for (int i = 0; i < es0.size(); ++i) {
      const double m = std::abs(es0.energies[i]);
      if (m < m0) {
        m1 = m0;
        i1 = i0;
        m0 = m;
        i0 = i;
      } else if (m < m1) {
        m1 = m;
        i1 = i;
      }
    }
    const double eta = eta_overlap(es0, i0, i1).eta;
    if (eta < 0.5)
      throw solver_error("ep_dispersion_classify: gapless at k = 0 but not exceptional "
                         "(mid-pair eta = " +
                         std::to_string(eta) + ")");
  }

  // log|det H(dk)| against log dk, dk in [1e-4, 1e-2]: below the edge-band
  // curvature scale, above determinant rounding noise for Ly <= 8
  const int npts = 9;
  std::vector<double> xs(npts), ys(npts);
  for (int i = 0; i < npts; ++i) {
    const double dk = 1e-4 * std::pow(100.0, double(i) / double(npts - 1));
    const MatrixXcd h = ribbon_hamiltonian(spec, g, dk).entries;
    const cdouble det = Eigen::PartialPivLU<MatrixXcd>(h).determinant();
    xs[i] = std::log(dk);
    ys[i] = std::log(std::abs(det));
  }
  EpClassification out;
  out.fit = linear_fit(xs, ys);
  out.exponent = out.fit.slope;
  if (out.exponent < 0.8 || out.exponent > 2.2)
    throw classification_error(
        "ep_dispersion_classify: fitted determinant exponent " + std::to_string(out.exponent) +
            " outside [0.8, 2.2] (r^2 = " + std::to_string(out.fit.r_squared) + ")",
        out.fit);
  out.kind = std::abs(out.exponent - 2.0) < std::abs(out.exponent - 1.0)
                 ? EpDispersionKind::quadratic_det
                 : EpDispersionKind::linear_det;

  // analytic cross-check (alpha = 0 keeps h0 block-off-diagonal): the
  // quadratic case is distinguished by det(R) -> 0 as dk -> 0
  if (std::abs(std::sin(p.alpha)) < 1e-12) {
    auto detR = [&](double dk) {
      const Eigen::MatrixXcd h0 = bloch_harmonics(spec, dk).h0;
      return std::abs(Eigen::Matrix2cd(h0.block(0, 2, 2, 2)).determinant());
    };
    out.schur_checked = true;
    out.det_R_vanishes = detR(1e-4) < 0.5 * detR(1e-3);
  }
  return out;
}

Eigen::MatrixXd real_occupied_projector(const Eigen::MatrixXd& h, double E_F, double tie_tol) {
  const int n = int(h.rows());
  const RealEig e = dgeev_full(h, true);
  std::vector<int> occ_cols;
  for (int j = 0; j < n; ++j) {
    const double d = e.wr[j] - E_F;
    if (std::abs(d) < tie_tol)
      throw numeric_refusal("occupation tie at E_F: |Re E - E_F| = " +
                            std::to_string(std::abs(d)) + " < " + std::to_string(tie_tol));
    if (d < 0.0) occ_cols.push_back(j);
  }
  // columns of vr span the occupied invariant subspace in real form: a
  // conjugate pair contributes (Re v, Im v), and both members share wr
  const MatrixXd inv = Eigen::PartialPivLU<MatrixXd>(e.vr).inverse();
  MatrixXd proj = MatrixXd::Zero(n, n);
  for (int j : occ_cols) proj.noalias() += e.vr.col(j) * inv.row(j);
  return proj;
}

}  // namespace nhee
