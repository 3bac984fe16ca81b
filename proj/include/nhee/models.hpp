#pragma once

#include <Eigen/Dense>
#include <complex>
#include <variant>
#include <vector>

#include "nhee/errors.hpp"

namespace nhee {

using cdouble = std::complex<double>;

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

// 2-band model with asymmetric k-dependent off-diagonal hoppings,
//   H(k,ky) = [[0, t e^{-i ky} + a0], [t e^{i ky} + (b0 - cos k)^B, 0]].
// All parameters are real; that reality is what keeps the entanglement
// entropy real for this model, so it is enforced at the type level.
struct TwoBandParams {
  double t = 0.8;
  double a0 = 1.0;
  double b0 = 1.2;
  int B = 1;  // hopping-distance exponent, B >= 1

  void validate() const {
    if (B < 1) throw config_error("two-band: B must be a positive integer");
    if (t == 0.0) throw config_error("two-band: t must be nonzero");
    if (a0 == 0.0) throw config_error("two-band: a0 must be nonzero");
  }
};

// 4-band model with an exceptional topological crossing.  The general family
// is (tau, sigma Pauli matrices in sublattice and spin space)
//   H = (cos(k+k0) + cos k0 + cos ky - M) tau_x sigma_0
//     + lambda [sin(k+k0) tau_y sigma_x - sin k0 tau_y sigma_y + sin ky tau_y sigma_z]
//     + Z (sin a tau_0 + cos a tau_x)(sigma_x + sigma_y + sigma_z)
//     + i delta tau_y sigma_0.
// The defaults lambda = 1, Z = 1, k0 = pi/2 give the main 4-band instance.
struct FourBandParams {
  double M = 3.0;
  double delta = 2.0;   // non-Hermiticity
  double alpha = 0.0;   // Zeeman mixing angle (radians)
  double lambda = 1.0;  // spin-orbit strength
  double Z = 1.0;       // Zeeman magnitude
  double k0 = 1.5707963267948966;  // momentum offset (radians)

  // The family is derived with k0 = arcsin(Z); requires |Z| <= 1.
  static FourBandParams with_k0_from_zeeman(double M, double delta, double alpha,
                                            double lambda, double Z);

  void validate() const {}  // all real values admissible
};

enum class YBoundary { open, periodic };

// Cylinder geometry: L unit cells around the circumference (momentum k is a
// good quantum number on the twisted grid), Ly cells along the open/periodic
// direction.  The entanglement cut is fixed at x = L/2, which is why odd L is
// rejected instead of rounded.
struct Geometry {
  int L = 100;
  int Ly = 3;
  YBoundary y_boundary = YBoundary::open;

  int cells_in_subregion() const { return L / 2; }
  void validate() const {
    if (L < 2 || L % 2 != 0) throw config_error("geometry: L must be even and positive");
    if (Ly < 1) throw config_error("geometry: Ly must be positive");
  }
};

struct ModelSpec {
  std::variant<TwoBandParams, FourBandParams> params;

  bool is_two_band() const { return std::holds_alternative<TwoBandParams>(params); }
  const TwoBandParams& two_band() const { return std::get<TwoBandParams>(params); }
  const FourBandParams& four_band() const { return std::get<FourBandParams>(params); }
  int orbitals() const { return is_two_band() ? 2 : 4; }
  void validate() const {
    if (is_two_band()) two_band().validate();
    else four_band().validate();
  }
};

// Twisted circumferential momenta k_m = (2m+1) pi / L, m = 0..L-1.
// Excludes k = 0 exactly, so the gapless point never sits on the grid.
std::vector<double> twisted_k_grid(int L);

// ---------------------------------------------------------------------------
// Bloch matrices and their ky-harmonics
// ---------------------------------------------------------------------------

Eigen::Matrix2cd bloch_two_band(const TwoBandParams& p, double k, double ky);
Eigen::Matrix4cd bloch_four_band(const FourBandParams& p, double k, double ky);

// Both models are first-harmonic in ky: H(k,ky) = h0(k) + h+ e^{i ky} + h- e^{-i ky}.
// The ribbon is assembled from these blocks analytically; no ky quadrature.
struct BlochHarmonics {
  Eigen::MatrixXcd h0, hplus, hminus;
};

BlochHarmonics bloch_harmonics(const ModelSpec& spec, double k);

// ---------------------------------------------------------------------------
// Ribbon (cylinder) Hamiltonians
// ---------------------------------------------------------------------------

struct RibbonMatrix {
  double k = 0.0;
  Eigen::MatrixXcd entries;  // (n_orb * Ly) square; basis index (y-1)*n_orb + s
};

RibbonMatrix ribbon_hamiltonian(const ModelSpec& spec, const Geometry& g, double k);

// Real-arithmetic ribbon for the two-band model (its blocks are real for real
// parameters); used by the correlation pipeline's real fast path.
Eigen::MatrixXd ribbon_two_band_real(const TwoBandParams& p, const Geometry& g, double k);

// Full 2D real-space Hamiltonian on the twisted ring (antiperiodic in x),
//   H[(x1,y1,s1),(x2,y2,s2)] = L^{-1} sum_k e^{ik(x1-x2)} [H_ribbon(k)](y1,s1),(y2,s2),
// with x-major index (x-1)*n_orb*Ly + (y-1)*n_orb + s.  Small systems only;
// this is the single-matrix route used by the Fock-space cross-checks.
Eigen::MatrixXcd full_hamiltonian(const ModelSpec& spec, const Geometry& g);

// ---------------------------------------------------------------------------
// Analytic identities of the two-band model
// ---------------------------------------------------------------------------

// Relative residual of det H_ribbon(k) against the Schur-identity prediction
// (det h0)^{Ly} with det h0 = -a0 (b0-cos k)^B, open boundary.  Refuses when
// the predicted determinant leaves double range, reporting the offending
// log-magnitude.
double det_identity_residual(const TwoBandParams& p, const Geometry& g, double k);

// GBZ winding criterion |a0 (b0 - cos k)^B| <= t^2.
bool topo_region_indicator(const TwoBandParams& p, double k);

// (b0 - cos k)^B, shared by several identities.
double two_band_offdiag(const TwoBandParams& p, double k);

}  // namespace nhee
