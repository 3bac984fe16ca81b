#include "nhee/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nhee/task_pool.hpp"

namespace nhee {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

constexpr double kPi = std::numbers::pi;

void fill_from_symbol(Eigen::MatrixXcd& pbar, const std::vector<MatrixXcd>& symbol,
                      int n_yb, int cells) {
  // symbol[d + cells - 1] holds the matrix-valued Fourier coefficient at
  // x1 - x2 = d; P-bar is block-Toeplitz in x within each (y,s) block pair.
  for (int o1 = 0; o1 < n_yb; ++o1)
    for (int o2 = 0; o2 < n_yb; ++o2)
      for (int x2 = 0; x2 < cells; ++x2)
        for (int x1 = 0; x1 < cells; ++x1)
          pbar(o1 * cells + x1, o2 * cells + x2) = symbol[x1 - x2 + cells - 1](o1, o2);
}

}  // namespace

Eigen::MatrixXcd band_projector(const BiorthEigenSystem& es, const std::vector<int>& occ) {
  if (occ.empty()) throw config_error("band_projector: occupied set must be nonempty");
  const int n = es.size();
  MatrixXcd u(n, int(occ.size())), l(int(occ.size()), n);
  for (std::size_t j = 0; j < occ.size(); ++j) {
    u.col(int(j)) = es.right.col(occ[j]);
    l.row(int(j)) = es.left.row(occ[j]);
  }
  return u * l;
}

Eigen::MatrixXcd projector_truncation(const BiorthEigenSystem& es, const std::vector<int>& occ,
                                      const std::vector<int>& a_modes) {
  const MatrixXcd p = band_projector(es, occ);
  const int na = int(a_modes.size());
  MatrixXcd pbar(na, na);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) pbar(i, j) = p(a_modes[i], a_modes[j]);
  return pbar;
}

void check_overflow_guard(const ModelSpec& spec, const Geometry& g) {
  if (!spec.is_two_band()) return;
  const double load = double(spec.two_band().B) * double(g.Ly) * std::log(double(g.L) / kPi);
  if (load > 600.0)
    throw numeric_refusal(
        "overflow guard: (B*Ly)*log(L/pi) = " + std::to_string(load) +
        " > 600 would push P-bar elements outside double range (B*Ly = " +
        std::to_string(spec.two_band().B * g.Ly) + ", L = " + std::to_string(g.L) + ")");
}

TruncatedProjector truncated_projector(const ModelSpec& spec, const Geometry& g, double E_F,
                                       const CorrelationOptions& opts) {
  spec.validate();
  g.validate();
  check_overflow_guard(spec, g);
  const int cells = opts.subregion_cells > 0 ? opts.subregion_cells : g.L / 2;
  if (cells < 1 || cells > g.L)
    throw config_error("truncated_projector: subregion must span 1..L unit cells");

  const int n_orb = spec.orbitals();
  const int n_yb = n_orb * g.Ly;
  const auto ks = twisted_k_grid(g.L);
  const int n_sym = 2 * cells - 1;

  TruncatedProjector tp;
  tp.L = g.L;
  tp.Ly = g.Ly;
  tp.n_orb = n_orb;
  tp.cells = cells;
  tp.matrix.resize(n_yb * cells, n_yb * cells);

  std::vector<MatrixXcd> symbol(n_sym, MatrixXcd::Zero(n_yb, n_yb));

  const bool real_path = spec.is_two_band() && !opts.force_complex;
  if (real_path) {
    // H(k) = H(-k) exactly for the two-band ribbon (k enters through cos k),
    // so the twisted grid pairs (k, 2pi-k) collapse to a real cosine sum over
    // the half grid and P-bar is a real matrix.
    const auto& p2 = spec.two_band();
    const int nk = g.L / 2;
    std::vector<MatrixXd> pk(nk);
    parallel_for(nk, opts.threads, [&](std::size_t i) {
      const MatrixXd h = ribbon_two_band_real(p2, g, ks[i]);
      pk[i] = real_occupied_projector(h, E_F, opts.tie_tol);
    });
    std::vector<MatrixXd> sym_real(n_sym, MatrixXd::Zero(n_yb, n_yb));
    for (int di = 0; di < n_sym; ++di) {
      const int d = di - (cells - 1);
      for (int i = 0; i < nk; ++i)
        sym_real[di].noalias() += (2.0 * std::cos(ks[i] * d) / double(g.L)) * pk[i];
    }
    for (int di = 0; di < n_sym; ++di) symbol[di] = sym_real[di].cast<cdouble>();
    tp.is_real = true;
  } else {
    std::vector<MatrixXcd> pk(g.L);
    parallel_for(g.L, opts.threads, [&](std::size_t i) {
      const BiorthEigenSystem es = biorth_eig(ribbon_hamiltonian(spec, g, ks[i]).entries);
      pk[i] = band_projector(es, occupied_indices(es, E_F, opts.tie_tol));
    });
    for (int di = 0; di < n_sym; ++di) {
      const int d = di - (cells - 1);
      for (int i = 0; i < g.L; ++i)
        symbol[di].noalias() +=
            (std::exp(cdouble(0.0, ks[i] * d)) / double(g.L)) * pk[i];
    }
  }
  fill_from_symbol(tp.matrix, symbol, n_yb, cells);
  return tp;
}

OccupationSpectrum occupation_spectrum(const Eigen::MatrixXcd& pbar, bool is_real) {
  VectorXcd w = is_real ? dense_eigenvalues_real(pbar.real()) : dense_eigenvalues(pbar);

  std::vector<int> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(w[a]), mb = std::abs(w[b]);
    if (ma != mb) return ma > mb;
    if (w[a].real() != w[b].real()) return w[a].real() > w[b].real();
    return w[a].imag() > w[b].imag();
  });

  OccupationSpectrum ps;
  ps.values.resize(w.size());
  for (int i = 0; i < w.size(); ++i) ps.values[i] = w[order[i]];
  ps.max_abs = ps.values.size() > 0 ? std::abs(ps.values[0]) : 0.0;

  // greedy conjugate pairing; tolerance scales with |p| because the nHCSC
  // spectra span many decades.  A distinct partner is preferred over
  // self-pairing: exactly-real twofold-degenerate values are collapsed
  // conjugate pairs (the paper's "twofold degenerate states"), and the
  // entropy branch bookkeeping relies on that identification.
  const int n = int(ps.values.size());
  ps.pair_map.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (ps.pair_map[i] >= 0) continue;
    const cdouble target = std::conj(ps.values[i]);
    const double tol = 1e-6 * std::max(1.0, std::abs(ps.values[i]));
    int best = -1;
    double best_d = 0.0;
    for (int j = i + 1; j < n; ++j) {
      if (ps.pair_map[j] >= 0) continue;
      const double d = std::abs(ps.values[j] - target);
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best >= 0 && best_d <= tol) {
      ps.pair_map[i] = best;
      ps.pair_map[best] = i;
    } else if (std::abs(ps.values[i] - target) <= tol) {
      ps.pair_map[i] = i;  // self-conjugate, no distinct partner
    }
  }
  return ps;
}

OccupationSpectrum occupation_spectrum(const TruncatedProjector& tp) {
  return occupation_spectrum(tp.matrix, tp.is_real);
}

EdgeProjectorReport edge_projector_approx(const TwoBandParams& p, const Geometry& g, double k) {
  p.validate();
  if (!topo_region_indicator(p, k))
    throw not_applicable_error("edge_projector_approx: k outside the topological region");
  const double b = two_band_offdiag(p, k);
  const double r = std::sqrt(std::abs(b / p.a0));
  if (r >= 1.0 - 1e-12)
    throw not_applicable_error("edge_projector_approx: r(k) >= 1, no skin compression toward y = 1");
  const double eps = std::sqrt(std::abs(p.a0 * b)) / std::abs(p.t);

  const int dim = 2 * g.Ly;
  Eigen::VectorXd right(dim), left(dim);
  for (int y = 0; y < g.Ly; ++y) {
    right[2 * y] = std::pow(r * eps, y);
    right[2 * y + 1] = std::pow(r, y + 1) * std::pow(eps, g.Ly - 1 - y);
    left[2 * y] = std::pow(eps / r, y);
    left[2 * y + 1] = std::pow(eps, g.Ly - 1 - y) / std::pow(r, y + 1);
  }
  const double norm = right.dot(left);
  if (norm == 0.0) throw solver_error("edge_projector_approx: degenerate normalization");

  EdgeProjectorReport rep;
  rep.pattern = ((right * left.transpose()) / norm).cast<cdouble>();

  const MatrixXd h = ribbon_two_band_real(p, g, k);
  const MatrixXd proj = real_occupied_projector(h, 0.0);
  const double pmax = proj.cwiseAbs().maxCoeff();
  // shape comparison on magnitudes: the asymptotic pattern is defined up to
  // normalization and carries no sign structure (the SSH zero mode alternates
  // as (-t'/t)^y, which the r,eps powers deliberately do not track)
  rep.dominance_ratio =
      (proj.cwiseAbs() - rep.pattern.real().cwiseAbs()).cwiseAbs().maxCoeff() / pmax;

  Eigen::Index imax = 0, jmax = 0;
  proj.cwiseAbs().maxCoeff(&imax, &jmax);
  rep.max_element_row = {int(imax) / 2, int(imax) % 2};
  rep.max_element_col = {int(jmax) / 2, int(jmax) % 2};
  return rep;
}

}  // namespace nhee
