#include "nhee/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nhee/task_pool.hpp"

namespace nhee {

namespace {

constexpr double kPi = std::numbers::pi;

// Gapless two-band sweeps resolve edge gaps ~ (a0 (b0-cos k1)^B / t^2)^{Ly/2},
// far below the public 1e-12 tie default at large L but still two orders of
// magnitude above eigenvalue rounding; see the occupied_indices contract.
constexpr double kSweepTieTol = 1e-14;

std::vector<double> branch_representatives(const OccupationSpectrum& ps) {
  std::vector<double> reps;
  double prev = 0.0;
  for (Eigen::Index i = 0; i < ps.values.size(); ++i) {
    const double mag = std::abs(ps.values[i]);  // sorted descending
    if (mag <= 2.0) break;
    if (reps.empty() || prev / mag > 10.0) reps.push_back(mag);
    prev = mag;
  }
  return reps;
}

SweepRow compute_row(const ModelSpec& spec, Geometry g, int L, double E_F,
                     const std::vector<int>& renyi_orders, double tie_tol, int threads) {
  SweepRow row;
  row.L = L;
  try {
    g.L = L;
    CorrelationOptions copts;
    copts.tie_tol = tie_tol;
    copts.threads = threads;
    const TruncatedProjector tp = truncated_projector(spec, g, E_F, copts);
    const OccupationSpectrum ps = occupation_spectrum(tp);
    const EntropyReport rep = entropy_report(ps, renyi_orders);
    row.s = rep.s_von_neumann;
    row.renyi = rep.renyi;
    row.max_abs_p = ps.max_abs;
    row.pt_imag_residual = rep.pt_imag_residual;
    row.branch_abs = branch_representatives(ps);
    row.ok = true;
  } catch (const error& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_entropy_vs_L(const ModelSpec& spec, const Geometry& g_template,
                                         const std::vector<int>& L_list, double E_F,
                                         const std::vector<int>& renyi_orders,
                                         const SweepOptions& opts) {
  // gapless two-band configurations need the tighter tie tolerance; keep the
  // public default everywhere else
  double tie_tol = opts.tie_tol;
  if (spec.is_two_band() && std::abs(spec.two_band().b0) <= 1.0)
    tie_tol = std::min(tie_tol, kSweepTieTol);
  std::vector<SweepRow> rows(L_list.size());
  parallel_for(L_list.size(), opts.threads, [&](std::size_t i) {
    rows[i] = compute_row(spec, g_template, L_list[i], E_F, renyi_orders, tie_tol, 1);
  });
  return rows;
}

std::vector<int> log_spaced_even(int lo, int hi, int n) {
  std::set<int> grid;
  for (int i = 0; i < n; ++i) {
    const double x = std::exp(std::log(double(lo)) +
                              (std::log(double(hi)) - std::log(double(lo))) * double(i) /
                                  double(n - 1));
    int v = int(std::lround(x / 2.0)) * 2;
    v = std::clamp(v, lo + (lo % 2), hi - (hi % 2));
    grid.insert(v);
  }
  return {grid.begin(), grid.end()};
}

ScalingFit fit_log_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> x, y, window;
  for (const SweepRow& r : rows) {
    if (!r.ok) continue;
    x.push_back(std::log(double(r.L)));
    y.push_back(r.s.real());
    window.push_back(double(r.L));
  }
  if (x.size() < 4) throw solver_error("fit_log_slope: need >= 4 successful rows");
  const LinearFit f = linear_fit(x, y);
  ScalingFit sf;
  sf.slope = f.slope;
  sf.intercept = f.intercept;
  sf.slope_stderr = f.slope_stderr;
  sf.r_squared = f.r_squared;
  sf.window = std::move(window);
  return sf;
}

std::vector<std::pair<double, double>> dsdlnl_curve(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  const SweepRow* prev = nullptr;
  for (const SweepRow& r : rows) {
    if (!r.ok) continue;
    if (prev) {
      const double dx = std::log(double(r.L)) - std::log(double(prev->L));
      if (dx > 0)
        pts.emplace_back(0.5 * (std::log(double(r.L)) + std::log(double(prev->L))),
                         (r.s.real() - prev->s.real()) / dx);
    }
    prev = &r;
  }
  return pts;
}

double predicted_gapless_slope(int B, int Ly) {
  const long long x = (long long)(B) * B * Ly * Ly;
  return -double((x - 1 + 1) / 2);  // ceil((x-1)/2) = floor(x/2) for integer x
}

std::vector<double> predicted_hierarchy(int B, int Ly) {
  std::vector<double> out;
  for (double nu = 0.5 * double(B * Ly - 1); nu > 1e-9; nu -= 1.0) out.push_back(nu);
  return out;
}

HierarchyReport hierarchy_from_rows(const std::vector<SweepRow>& rows, int B, int Ly) {
  HierarchyReport rep;
  if (B > 0 && Ly > 0) rep.predicted = predicted_hierarchy(B, Ly);

  std::size_t n_branches = std::string::npos;
  std::vector<const SweepRow*> ok_rows;
  for (const SweepRow& r : rows) {
    if (!r.ok) continue;
    ok_rows.push_back(&r);
    for (std::size_t b = 0; b < r.branch_abs.size(); ++b)
      rep.long_rows.push_back({r.L, int(b) + 1, r.branch_abs[b]});
    if (n_branches == std::string::npos) n_branches = r.branch_abs.size();
    else if (n_branches != r.branch_abs.size()) {
      rep.rank_swap_warning = true;
      n_branches = std::min(n_branches, r.branch_abs.size());
    }
  }
  if (ok_rows.size() < 4) throw solver_error("hierarchy: need >= 4 successful rows");
  if (n_branches == std::string::npos || n_branches == 0)
    throw solver_error("hierarchy: no divergent branch (all |p| <= 2)");

  for (std::size_t b = 0; b < n_branches; ++b) {
    std::vector<double> x, y;
    for (const SweepRow* r : ok_rows) {
      x.push_back(std::log(double(r->L)));
      y.push_back(std::log(r->branch_abs[b]));
    }
    rep.exponents.push_back(linear_fit(x, y).slope);
  }
  return rep;
}

HierarchyReport hierarchy_exponents(const ModelSpec& spec, const Geometry& g_template,
                                    const std::vector<int>& L_list, double E_F,
                                    const SweepOptions& opts) {
  const auto rows = sweep_entropy_vs_L(spec, g_template, L_list, E_F, {}, opts);
  int B = 0, Ly = 0;
  if (spec.is_two_band()) {
    B = spec.two_band().B;
    Ly = g_template.Ly;
  }
  return hierarchy_from_rows(rows, B, Ly);
}

GappedScalingResult gapped_scaling(const TwoBandParams& p, const GappedWindows& w,
                                   double E_F, const SweepOptions& opts) {
  p.validate();
  if (p.b0 <= 1.0) throw config_error("gapped_scaling: requires b0 > 1");
  if (w.kappa_L.size() < 4) throw config_error("gapped_scaling: kappa window needs >= 4 L values");
  if (w.kappa_Ly.empty() || w.smin_Ly.empty())
    throw config_error("gapped_scaling: empty Ly window");
  const int kappa_L_max = *std::max_element(w.kappa_L.begin(), w.kappa_L.end());
  if (w.smin_L <= kappa_L_max)
    throw config_error("gapped_scaling: S_min window (L >> Ly) overlaps the kappa window");
  {
    // topological nontrivialy near k = 0 is what produces the edge bands
    TwoBandParams probe = p;
    if (!topo_region_indicator(probe, kPi / double(kappa_L_max)))
      throw config_error("gapped_scaling: configuration is topologically trivial near k = 0");
  }
  const ModelSpec spec{p};

  GappedScalingResult out;
  out.ly_values = w.kappa_Ly;
  out.per_ly_fits.resize(w.kappa_Ly.size());
  parallel_for(w.kappa_Ly.size(), opts.threads, [&](std::size_t i) {
    Geometry g{2, w.kappa_Ly[i], YBoundary::open};
    SweepOptions inner = opts;
    inner.threads = 1;
    const auto rows = sweep_entropy_vs_L(spec, g, w.kappa_L, E_F, {}, inner);
    out.per_ly_fits[i] = fit_log_slope(rows);
  });

  out.slope_magnitude_monotonic = true;
  std::vector<double> lys, slopes;
  for (std::size_t i = 0; i < w.kappa_Ly.size(); ++i) {
    lys.push_back(double(w.kappa_Ly[i]));
    slopes.push_back(out.per_ly_fits[i].slope);
    if (i > 0 && std::abs(out.per_ly_fits[i].slope) <= std::abs(out.per_ly_fits[i - 1].slope))
      out.slope_magnitude_monotonic = false;
  }
  out.slope_vs_ly = linear_fit(lys, slopes);
  out.kappa = -out.slope_vs_ly.slope;  // slope(Ly) = -(kappa Ly + xi)
  out.xi = -out.slope_vs_ly.intercept;

  out.smin_ly = w.smin_Ly;
  out.smin_values.resize(w.smin_Ly.size());
  parallel_for(w.smin_Ly.size(), opts.threads, [&](std::size_t i) {
    Geometry g{w.smin_L, w.smin_Ly[i], YBoundary::open};
    SweepOptions inner = opts;
    inner.threads = 1;
    const auto rows = sweep_entropy_vs_L(spec, g, {w.smin_L}, E_F, {}, inner);
    if (!rows[0].ok) throw solver_error("gapped_scaling: S_min row failed: " + rows[0].error);
    out.smin_values[i] = rows[0].s.real();
  });
  std::vector<double> smin_x;
  for (int ly : w.smin_Ly) smin_x.push_back(double(ly));
  out.smin_fit = linear_fit(smin_x, out.smin_values);
  out.smin_predicted_slope = -std::log(p.a0 / std::pow(p.b0 - 1.0, p.B));
  return out;
}

BulkEpReport bulk_ep_scan(const FourBandParams& p, const Geometry& g_template, double E_F,
                          const std::vector<int>& L_list, const SweepOptions& opts) {
  const ModelSpec spec{p};
  BulkEpReport rep;
  rep.rows.resize(L_list.size());
  parallel_for(L_list.size(), opts.threads, [&](std::size_t i) {
    BulkEpRow row;
    row.L = L_list[i];
    try {
      Geometry g = g_template;
      g.L = L_list[i];
      CorrelationOptions copts;
      copts.tie_tol = opts.tie_tol;
      copts.threads = 1;
      const TruncatedProjector tp = truncated_projector(spec, g, E_F, copts);
      const OccupationSpectrum ps = occupation_spectrum(tp);
      row.s = von_neumann_entropy(ps);
      row.max_re_p = ps.values.real().maxCoeff();
      row.min_re_p = ps.values.real().minCoeff();
      row.outside_interval = row.max_re_p > 1.0 + 1e-6 || row.min_re_p < -1e-6;
      row.ok = true;
    } catch (const error& e) {
      row.error = e.what();
    }
    rep.rows[i] = std::move(row);
  });

  const BulkEpRow* first_ok = nullptr;
  const BulkEpRow* last_ok = nullptr;
  for (const auto& r : rep.rows) {
    if (!r.ok) continue;
    if (!first_ok) first_ok = &r;
    last_ok = &r;
    if (r.outside_interval && !rep.exit_L) rep.exit_L = r.L;
  }
  // deepest interior local minimum of Re S, if any; a dip must clear the
  // saturation noise floor of an area-law plateau
  double dip_depth = 0.0;
  constexpr double kDipFloor = 1e-6;
  for (std::size_t i = 1; i + 1 < rep.rows.size(); ++i) {
    if (!rep.rows[i - 1].ok || !rep.rows[i].ok || !rep.rows[i + 1].ok) continue;
    const double s0 = rep.rows[i - 1].s.real(), s1 = rep.rows[i].s.real(),
                 s2 = rep.rows[i + 1].s.real();
    if (s1 < s0 - kDipFloor && s1 < s2 - kDipFloor) {
      const double depth = std::min(s0 - s1, s2 - s1);
      if (!rep.dip_L || depth > dip_depth) {
        rep.dip_L = rep.rows[i].L;
        dip_depth = depth;
      }
    }
  }
  rep.trend_increasing =
      first_ok && last_ok &&
      last_ok->s.real() >= first_ok->s.real() - 1e-6 * (1.0 + std::abs(first_ok->s.real()));
  return rep;
}

}  // namespace nhee
