#include "nhee/entropy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nhee {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTiny = 1e-300;

// z^n by repeated multiplication (integer-power semantics, no exp/log branch)
cdouble ipow(cdouble z, int n) {
  cdouble r{1.0, 0.0};
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

// principal log with a chosen branch sign on the negative real axis
cdouble plog_signed(cdouble z, double cut_sign) {
  if (z.imag() == 0.0 && z.real() < 0.0) return {std::log(-z.real()), cut_sign * kPi};
  return principal_log(z);
}

// one von Neumann term, -p log p - (1-p) log(1-p)
cdouble vn_term_signed(cdouble p, double cut_sign) {
  cdouble s{0.0, 0.0};
  if (std::abs(p) > kTiny) s -= p * plog_signed(p, cut_sign);
  const cdouble q = 1.0 - p;
  if (std::abs(q) > kTiny) s -= q * plog_signed(q, cut_sign);
  return s;
}

cdouble vn_term(cdouble p) { return vn_term_signed(p, +1.0); }

// log(a^n + sgn*b^n) with the overflow-safe positive-real rescaling
// log m^n + Log((a/m)^n + sgn (b/m)^n); multiplying by a positive real never
// moves the principal branch.
cdouble log_power_sum(cdouble a, cdouble b, int n, double sgn) {
  const double m = std::max(std::abs(a), std::abs(b));
  if (m < kTiny) return principal_log(cdouble(0.0, 0.0));  // -inf; caller's business
  const cdouble bracket = ipow(a / m, n) + sgn * ipow(b / m, n);
  return double(n) * std::log(m) + principal_log(bracket);
}

}  // namespace

cdouble principal_log(cdouble z) {
  if (z.imag() == 0.0) {  // covers -0.0: fix the branch at log(-x) = log x + i pi
    if (z.real() < 0.0) return {std::log(-z.real()), kPi};
    return {std::log(z.real()), 0.0};
  }
  return std::log(z);
}

cdouble von_neumann_entropy(const Eigen::VectorXcd& ps) {
  cdouble s{0.0, 0.0};
  for (Eigen::Index i = 0; i < ps.size(); ++i) s += vn_term(ps[i]);
  return s;
}

cdouble von_neumann_entropy(const OccupationSpectrum& ps) {
  cdouble s{0.0, 0.0};
  for (Eigen::Index i = 0; i < ps.values.size(); ++i) {
    const int j = i < Eigen::Index(ps.pair_map.size()) ? ps.pair_map[i] : -1;
    // the later member of a cross-pair takes the lower branch at the cut
    const double cut_sign = (j >= 0 && j < i) ? -1.0 : +1.0;
    s += vn_term_signed(ps.values[i], cut_sign);
  }
  return s;
}

cdouble renyi_entropy(const Eigen::VectorXcd& ps, int n) {
  if (n < 2) throw config_error("renyi_entropy: order must be an integer >= 2");
  cdouble s{0.0, 0.0};
  for (Eigen::Index i = 0; i < ps.size(); ++i)
    s += log_power_sum(ps[i], 1.0 - ps[i], n, +1.0);
  return s / double(1 - n);
}

BosonRenyi boson_renyi_entropy(const Eigen::VectorXcd& ps, int n) {
  if (n < 2) throw config_error("boson_renyi_entropy: order must be an integer >= 2");
  BosonRenyi out{{0.0, 0.0}, false};
  for (Eigen::Index i = 0; i < ps.size(); ++i) {
    const cdouble p = ps[i];
    out.value += log_power_sum(p, p - 1.0, n, -1.0);
    // physical boson occupancies are p = 1 + nu with nu >= 0, where the log
    // argument (1+nu)^n - nu^n stays on the positive real axis
    if (p.imag() != 0.0 || p.real() < 1.0) out.nonphysical = true;
  }
  out.value /= double(n - 1);
  return out;
}

ContributionDiagnostic eigenvalue_contribution(cdouble p, double L, double nu) {
  ContributionDiagnostic d;
  d.exact = vn_term(p);
  d.in_regime = std::abs(p) > 2.0;
  if (!d.in_regime) return d;  // precondition violation reported via the flag
  const double c = std::abs(p) / std::pow(L, nu);
  d.asymptotic_real = -nu * std::log(L) - std::log(c) - 1.0;
  d.asymptotic_imag = kPi * p.real();
  return d;
}

double pt_pairing_residual(const Eigen::VectorXcd& ps) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ps.size(); ++i) {
    const cdouble target = std::conj(ps[i]);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < ps.size(); ++j)
      best = std::min(best, std::abs(ps[j] - target));
    worst = std::max(worst, best / std::max(1.0, std::abs(ps[i])));
  }
  return worst;
}

EntropyReport entropy_report(const OccupationSpectrum& ps, const std::vector<int>& renyi_orders) {
  EntropyReport rep;
  rep.contributions.reserve(ps.values.size());
  for (Eigen::Index i = 0; i < ps.values.size(); ++i) {
    const int j = i < Eigen::Index(ps.pair_map.size()) ? ps.pair_map[i] : -1;
    const double cut_sign = (j >= 0 && j < i) ? -1.0 : +1.0;
    rep.contributions.push_back(vn_term_signed(ps.values[i], cut_sign));
    rep.s_von_neumann += rep.contributions.back();
  }
  auto rel_imag = [](cdouble s) { return std::abs(s.imag()) / (std::abs(s.real()) + 1.0); };
  rep.pt_imag_residual = rel_imag(rep.s_von_neumann);
  for (int n : renyi_orders) {
    const cdouble s = renyi_entropy(ps.values, n);
    rep.renyi[n] = s;
    rep.pt_imag_residual = std::max(rep.pt_imag_residual, rel_imag(s));
  }
  return rep;
}

}  // namespace nhee
