#include "nhee/models.hpp"

#include <cmath>
#include <numbers>

namespace nhee {

namespace {

constexpr double kPi = std::numbers::pi;
const cdouble kI{0.0, 1.0};

// Pauli matrices; sigma[0] is the identity.
Eigen::Matrix2cd pauli(int mu) {
  Eigen::Matrix2cd s;
  switch (mu) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -kI, kI, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& tau, const Eigen::Matrix2cd& sigma) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = tau(i, j) * sigma;
  return out;
}

// ky-independent part of the 4-band Bloch matrix.
Eigen::Matrix4cd four_band_h0(const FourBandParams& p, double k) {
  const double f = std::cos(k + p.k0) + std::cos(p.k0);
  Eigen::Matrix4cd h = (f - p.M) * kron2(pauli(1), pauli(0));
  h += p.lambda * std::sin(k + p.k0) * kron2(pauli(2), pauli(1));
  h -= p.lambda * std::sin(p.k0) * kron2(pauli(2), pauli(2));
  const Eigen::Matrix2cd zeeman_tau =
      std::sin(p.alpha) * pauli(0) + std::cos(p.alpha) * pauli(1);
  h += p.Z * kron2(zeeman_tau, pauli(1) + pauli(2) + pauli(3));
  h += kI * p.delta * kron2(pauli(2), pauli(0));
  return h;
}

// cos ky tau_x sigma_0 + lambda sin ky tau_y sigma_z splits into the two
// first harmonics h± = (tau_x sigma_0 ∓ i lambda tau_y sigma_z) / 2.
Eigen::Matrix4cd four_band_hplus(const FourBandParams& p) {
  return 0.5 * (kron2(pauli(1), pauli(0)) - kI * p.lambda * kron2(pauli(2), pauli(3)));
}

Eigen::Matrix4cd four_band_hminus(const FourBandParams& p) {
  return 0.5 * (kron2(pauli(1), pauli(0)) + kI * p.lambda * kron2(pauli(2), pauli(3)));
}

}  // namespace

FourBandParams FourBandParams::with_k0_from_zeeman(double M, double delta, double alpha,
                                                   double lambda, double Z) {
  if (std::abs(Z) > 1.0)
    throw config_error("four-band: k0 = arcsin(Z) requires |Z| <= 1");
  FourBandParams p;
  p.M = M;
  p.delta = delta;
  p.alpha = alpha;
  p.lambda = lambda;
  p.Z = Z;
  p.k0 = std::asin(Z);
  return p;
}

std::vector<double> twisted_k_grid(int L) {
  if (L < 1) throw config_error("twisted_k_grid: L must be positive");
  std::vector<double> ks(L);
  for (int m = 0; m < L; ++m) ks[m] = (2.0 * m + 1.0) * kPi / double(L);
  return ks;
}

double two_band_offdiag(const TwoBandParams& p, double k) {
  const double base = p.b0 - std::cos(k);
  double r = 1.0;
  for (int i = 0; i < p.B; ++i) r *= base;
  return r;
}

Eigen::Matrix2cd bloch_two_band(const TwoBandParams& p, double k, double ky) {
  Eigen::Matrix2cd h;
  h << 0.0, p.t * std::exp(-kI * ky) + p.a0,
       p.t * std::exp(kI * ky) + two_band_offdiag(p, k), 0.0;
  return h;
}

Eigen::Matrix4cd bloch_four_band(const FourBandParams& p, double k, double ky) {
  Eigen::Matrix4cd h = four_band_h0(p, k);
  h += std::cos(ky) * kron2(pauli(1), pauli(0));
  h += p.lambda * std::sin(ky) * kron2(pauli(2), pauli(3));
  return h;
}

BlochHarmonics bloch_harmonics(const ModelSpec& spec, double k) {
  BlochHarmonics out;
  if (spec.is_two_band()) {
    const auto& p = spec.two_band();
    Eigen::Matrix2cd h0, hp, hm;
    h0 << 0.0, p.a0, two_band_offdiag(p, k), 0.0;
    hp << 0.0, 0.0, p.t, 0.0;
    hm << 0.0, p.t, 0.0, 0.0;
    out.h0 = h0;
    out.hplus = hp;
    out.hminus = hm;
  } else {
    const auto& p = spec.four_band();
    out.h0 = four_band_h0(p, k);
    out.hplus = four_band_hplus(p);
    out.hminus = four_band_hminus(p);
  }
  return out;
}

RibbonMatrix ribbon_hamiltonian(const ModelSpec& spec, const Geometry& g, double k) {
  spec.validate();
  if (g.Ly < 1) throw config_error("ribbon: Ly must be positive");
  const BlochHarmonics hb = bloch_harmonics(spec, k);
  const int n = spec.orbitals();
  const int dim = n * g.Ly;
  RibbonMatrix rm;
  rm.k = k;
  rm.entries = Eigen::MatrixXcd::Zero(dim, dim);
  for (int y = 0; y < g.Ly; ++y) rm.entries.block(n * y, n * y, n, n) = hb.h0;
  for (int y = 0; y + 1 < g.Ly; ++y) {
    rm.entries.block(n * y, n * (y + 1), n, n) += hb.hplus;
    rm.entries.block(n * (y + 1), n * y, n, n) += hb.hminus;
  }
  if (g.y_boundary == YBoundary::periodic) {
    // wrap-around blocks close the cylinder in y as well
    rm.entries.block(n * (g.Ly - 1), 0, n, n) += hb.hplus;
    rm.entries.block(0, n * (g.Ly - 1), n, n) += hb.hminus;
  }
  return rm;
}

Eigen::MatrixXd ribbon_two_band_real(const TwoBandParams& p, const Geometry& g, double k) {
  p.validate();
  const double b = two_band_offdiag(p, k);
  const int dim = 2 * g.Ly;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int y = 0; y < g.Ly; ++y) {
    h(2 * y, 2 * y + 1) = p.a0;
    h(2 * y + 1, 2 * y) = b;
  }
  for (int y = 0; y + 1 < g.Ly; ++y) {
    h(2 * y + 1, 2 * (y + 1)) = p.t;       // h+ block
    h(2 * (y + 1), 2 * y + 1) = p.t;       // h- block
  }
  if (g.y_boundary == YBoundary::periodic) {
    h(2 * g.Ly - 1, 0) += p.t;
    h(0, 2 * g.Ly - 1) += p.t;
  }
  return h;
}

Eigen::MatrixXcd full_hamiltonian(const ModelSpec& spec, const Geometry& g) {
  g.validate();
  const int n = spec.orbitals();
  const int nyb = n * g.Ly;
  const int dim = g.L * nyb;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const auto ks = twisted_k_grid(g.L);
  for (double k : ks) {
    const Eigen::MatrixXcd hk = ribbon_hamiltonian(spec, g, k).entries;
    for (int x1 = 0; x1 < g.L; ++x1)
      for (int x2 = 0; x2 < g.L; ++x2) {
        const cdouble phase = std::exp(cdouble(0.0, k * double(x1 - x2))) / double(g.L);
        h.block(x1 * nyb, x2 * nyb, nyb, nyb) += phase * hk;
      }
  }
  return h;
}

double det_identity_residual(const TwoBandParams& p, const Geometry& g, double k) {
  p.validate();
  if (g.y_boundary != YBoundary::open)
    throw config_error("det identity holds for the open y-boundary only");
  const double base = p.a0 * two_band_offdiag(p, k);
  const double log_pred = double(g.Ly) * std::log(std::abs(base));
  if (std::abs(log_pred) > 700.0)
    throw numeric_refusal("det identity: predicted determinant leaves double range, log|det| = " +
                          std::to_string(log_pred));
  // det h0 = -a0 (b0 - cos k)^B, so the Schur product is (-base)^Ly
  const double sign = (g.Ly % 2 == 1 && base > 0.0) ? -1.0 : 1.0;
  const double predicted = sign * std::exp(log_pred);
  const Eigen::MatrixXd h = ribbon_two_band_real(p, g, k);
  const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(h).determinant();
  return std::abs(det - predicted) / std::abs(predicted);
}

bool topo_region_indicator(const TwoBandParams& p, double k) {
  return std::abs(p.a0 * two_band_offdiag(p, k)) <= p.t * p.t;
}

}  // namespace nhee
