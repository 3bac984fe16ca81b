#include <doctest.h>

#include <cmath>
#include <cstring>

#include "nhee/scaling.hpp"

using namespace nhee;

namespace {

std::vector<SweepRow> synthetic_rows(const std::vector<int>& ls, double slope, double icept) {
  std::vector<SweepRow> rows;
  for (int l : ls) {
    SweepRow r;
    r.L = l;
    r.ok = true;
    r.s = cdouble(slope * std::log(double(l)) + icept, 0.0);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_SUITE_BEGIN("scaling");

TEST_CASE("log-slope fit recovers a synthetic law exactly") {
  const auto rows = synthetic_rows({20, 40, 80, 160, 320}, -4.0, 2.0);
  const auto f = fit_log_slope(rows);
  CHECK(f.slope == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.window.size() == 5);
  CHECK_THROWS_AS(fit_log_slope(synthetic_rows({20, 40, 80}, -4.0, 2.0)), solver_error);
  const auto curve = dsdlnl_curve(rows);
  REQUIRE(curve.size() == 4);
  for (const auto& [x, dy] : curve) CHECK(dy == doctest::Approx(-4.0).epsilon(1e-10));
}

TEST_CASE("predicted quadratic-law slopes and hierarchy exponents") {
  CHECK(predicted_gapless_slope(1, 3) == -4.0);
  CHECK(predicted_gapless_slope(1, 5) == -12.0);
  CHECK(predicted_gapless_slope(2, 3) == -18.0);
  CHECK(predicted_hierarchy(1, 3) == std::vector<double>{1.0});
  CHECK(predicted_hierarchy(1, 5) == std::vector<double>{2.0, 1.0});
  CHECK(predicted_hierarchy(2, 3) == std::vector<double>{2.5, 1.5, 0.5});
}

TEST_CASE("sweep: Hermitian control grows and saturates, gapless goes negative") {
  {
    FourBandParams p;
    p.M = 1.2;
    p.delta = 0.0;
    p.alpha = 0.0;
    const auto rows = sweep_entropy_vs_L(ModelSpec{p}, {2, 1, YBoundary::open},
                                         {20, 40, 80}, 0.0, {2});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      REQUIRE(r.ok);
      CHECK(r.s.real() > 0.0);
    }
    CHECK(rows[1].s.real() >= rows[0].s.real());
    CHECK(rows[2].s.real() >= rows[1].s.real());
    // area-law saturation: increments shrink
    CHECK(rows[2].s.real() - rows[1].s.real() < rows[1].s.real() - rows[0].s.real() + 1e-6);
  }
  {
    const ModelSpec spec{TwoBandParams{0.5, 2.0, 1.0, 1}};
    const auto rows =
        sweep_entropy_vs_L(spec, {2, 3, YBoundary::open}, {50, 100, 200}, 0.0, {2});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      REQUIRE(rows[i].ok);
      CHECK(rows[i].s.real() < -5.0);
      if (i > 0) CHECK(rows[i].s.real() < rows[i - 1].s.real());
      CHECK(rows[i].pt_imag_residual < 1e-6);
    }
  }
}

TEST_CASE("gapped plateau: S_A(L) stabilizes once L >> Ly") {
  const ModelSpec spec{TwoBandParams{0.8, 1.0, 1.2, 1}};
  const auto rows = sweep_entropy_vs_L(spec, {2, 4, YBoundary::open}, {24, 48}, 0.0, {});
  REQUIRE(rows[0].ok);
  REQUIRE(rows[1].ok);
  CHECK(std::abs(rows[1].s.real() - rows[0].s.real()) < 0.05 * std::abs(rows[0].s.real()));
}

TEST_CASE("sweeps are bitwise deterministic across thread counts") {
  const ModelSpec spec{TwoBandParams{0.5, 2.0, 1.0, 1}};
  SweepOptions s1, s4;
  s1.threads = 1;
  s4.threads = 4;
  const auto a = sweep_entropy_vs_L(spec, {2, 3, YBoundary::open}, {30, 50, 70, 90}, 0.0, {2}, s1);
  const auto b = sweep_entropy_vs_L(spec, {2, 3, YBoundary::open}, {30, 50, 70, 90}, 0.0, {2}, s4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(&a[i].s, &b[i].s, sizeof(cdouble)) == 0);
    CHECK(std::memcmp(&a[i].max_abs_p, &b[i].max_abs_p, sizeof(double)) == 0);
    const cdouble ra = a[i].renyi.at(2), rb = b[i].renyi.at(2);
    CHECK(std::memcmp(&ra, &rb, sizeof(cdouble)) == 0);
  }
  const auto fa = fit_log_slope(a), fb = fit_log_slope(b);
  CHECK(std::memcmp(&fa.slope, &fb.slope, sizeof(double)) == 0);
}

TEST_CASE("hierarchy: single branch with unit exponent at B=1, Ly=3") {
  const ModelSpec spec{TwoBandParams{0.5, 2.0, 1.0, 1}};
  const auto rep =
      hierarchy_exponents(spec, {2, 3, YBoundary::open}, {50, 100, 200, 400}, 0.0);
  REQUIRE(rep.exponents.size() >= 1);
  CHECK(std::abs(rep.exponents[0] - 1.0) < 0.15);
  CHECK(rep.predicted == std::vector<double>{1.0});
  CHECK(!rep.long_rows.empty());
}

TEST_CASE("gapped scaling rejects bad windows") {
  const TwoBandParams p{0.8, 1.0, 1.2, 1};
  GappedWindows w;
  w.kappa_L = {22, 24, 26, 28};
  w.kappa_Ly = {22, 24};
  w.smin_Ly = {4, 6};
  w.smin_L = 26;  // overlaps the kappa window
  CHECK_THROWS_AS(gapped_scaling(p, w), config_error);
  w.smin_L = 60;
  GappedWindows bad = w;
  bad.kappa_L = {22, 24};  // too few points
  CHECK_THROWS_AS(gapped_scaling(p, bad), config_error);
  CHECK_THROWS_AS(gapped_scaling(TwoBandParams{0.5, 2.0, 1.0, 1}, w), config_error);
}

TEST_CASE("bulk EP scan: gapped Fermi energy yields an empty dip") {
  FourBandParams p;
  p.M = 3.0;
  p.delta = 2.0;
  p.alpha = 1.5707963267948966;  // trivial, line-gapped along Re(E) = 0
  const auto rep = bulk_ep_scan(p, {2, 2, YBoundary::open}, 0.0, {20, 30, 40, 50});
  for (const auto& r : rep.rows) REQUIRE(r.ok);
  CHECK_FALSE(rep.exit_L.has_value());
  CHECK_FALSE(rep.dip_L.has_value());
  CHECK(rep.trend_increasing);
}

TEST_CASE("log-spaced even grids") {
  const auto g = log_spaced_even(100, 600, 6);
  CHECK(g.size() >= 5);
  CHECK(g.front() == 100);
  CHECK(g.back() == 600);
  for (int v : g) CHECK(v % 2 == 0);
}

TEST_SUITE_END();
