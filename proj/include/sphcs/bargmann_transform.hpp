#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sphcs/coherent_states.hpp"

namespace sphcs {

using SphereFunction = std::function<cplx(const Eigen::VectorXd &)>;
using HoloFunction = std::function<cplx(const Eigen::VectorXcd &)>;

/// Node of a quadrature rule on the unit sphere S^d or on S^{d-1}.
struct SphereNode {
  Eigen::VectorXd x;
  double w = 0.0;
};

/// d=1: uniform trapezoid in theta; d=2: Gauss-Legendre in cos(theta) times
/// uniform azimuth; d=3: Hopf coordinates (u = sin^2 eta Gauss-Legendre, two
/// uniform angles). `order` is the Gauss-Legendre count; uniform angles get
/// 2 * order + 1 nodes. Weights sum to the sphere volume.
std::vector<SphereNode> sphere_rule(int dim, int order);

struct QuadOptions {
  int sphere_order = 0;  // 0: chosen from max_degree
  int angular_order = 0; // rule on S^{d-1} for momentum directions
  int radial_nodes = 24; // Gauss-Legendre nodes per radial panel
  int radial_panels = 4;
  double decay_target = 1e-16; // integrand size at p_max relative to its peak
};

enum class FiberMeasure {
  resolution, // nu(2 tau, 2p) beta(p) dp dx
  inversion   // nu(tau, p) (sinh p / p)^{d-1} dp
};

const char *to_string(FiberMeasure m);

/// Momentum-fiber and sphere nodes for integrals over T*(S^d) with
/// dimensionless momentum p (units of m omega r) and unit-sphere x.
struct QuadratureSpec {
  int dim = 1;
  double tau = 0.5;
  int max_degree = 8;
  FiberMeasure measure = FiberMeasure::resolution;
  std::vector<SphereNode> sphere;
  std::vector<SphereNode> directions; // unit vectors of R^d with weights
  Rule radial;                        // on [0, p_max]
  double p_max = 0.0;

  /// p_max is chosen so the density at p_max times exp(g max_degree p_max)
  /// (g = 2 for resolution, 1 for inversion) is below decay_target times its
  /// peak, then checked against the exact density.
  static QuadratureSpec make(int dim, double tau, int max_degree,
                             FiberMeasure measure = FiberMeasure::resolution,
                             const QuadOptions &opt = {});
  double sphere_volume() const;
};

/// Phase-space densities. beta(p) = 2^d (sinh 2p / 2p)^{d-1}.
struct PhaseDensity {
  int dim = 1;
  double tau = 0.5;
  FiberMeasure kind = FiberMeasure::resolution;

  double beta(double p) const;
  /// resolution: nu(2 tau, 2p) beta(p); inversion: nu(tau, p) (sinh p/p)^{d-1}.
  double weight(double p) const;
  /// Volume of the unit sphere S^{d-1} (radial reductions).
  double c_d() const;
};

/// Flattened nodes of the fiber bundle rule: point a = a(x, p) of the unit
/// complex sphere and weight = sphere weight * direction weight * radial
/// weight * p^{d-1} * density(p).
struct PhaseGrid {
  int dim = 1;
  std::vector<Eigen::VectorXd> x, p;
  std::vector<Eigen::VectorXcd> a;
  std::vector<double> density; // density(|p|) alone
  std::vector<double> w;
  std::size_t size() const { return w.size(); }
};

PhaseGrid phase_grid(const QuadratureSpec &quad, const PhaseDensity &density);
/// Fiber over a single point x (sphere weight 1).
PhaseGrid fiber_grid(const QuadratureSpec &quad, const PhaseDensity &density,
                     const Eigen::VectorXd &x);

/// a(x, p) = cosh|p| x + i sinh|p| p / |p| on the unit sphere.
Eigen::VectorXcd phase_to_complex(const Eigen::VectorXd &x,
                                  const Eigen::VectorXd &p);

/// Orthonormal basis of the tangent plane at x (columns).
Eigen::MatrixXd tangent_frame(const Eigen::VectorXd &x);

/// Finite sum of basis functions (d = 1, 2) and null-vector harmonics
/// (u . x)^l with u . u = 0 (any d), continued holomorphically.
struct BandLimitedFunction {
  int dim = 1;
  BasisSpec basis{};
  Eigen::VectorXcd coeffs; // over basis; empty when unused
  struct Term {
    cplx coeff;
    Eigen::VectorXcd u;
    int degree;
  };
  std::vector<Term> terms;

  static BandLimitedFunction from_basis(const BasisSpec &b, Eigen::VectorXcd c);
  static BandLimitedFunction null_harmonic(int dim, Eigen::VectorXcd u, int degree,
                                           cplx coeff = 1.0);
  /// d = 1: e_n; d = 2: Y_{l,m}; d = 3: sqrt((l+1) / 2 pi^2) (x1 + i x2)^l
  /// rotated so that m selects the plane (x1 + i x2, x3 + i x4 for m = 1).
  static BandLimitedFunction harmonic(int dim, int l, int m = 0);
  /// Gaussian random coefficients on every degree <= max_degree (d = 3: the
  /// three harmonic presets per degree), scaled to unit L^2 norm.
  static BandLimitedFunction random(int dim, int max_degree, std::uint64_t seed);

  int max_degree() const;
  /// f(a) continued to C^{d+1}.
  cplx operator()(const Eigen::VectorXcd &a) const;
  /// e^{-t J~^2 / 2} f at a: each degree-l part times e^{-t l(l+d-1)/2}.
  cplx heat(const Eigen::VectorXcd &a, double t) const;
  BandLimitedFunction &operator+=(const BandLimitedFunction &o);
  BandLimitedFunction scaled(cplx s) const;
};

/// Samples of C f(a) = int rho_tau(a, x) f(x) dx by the sphere rule, for a on
/// the unit complex sphere.
std::vector<cplx> sb_transform(const SphereFunction &f, double tau,
                               const std::vector<Eigen::VectorXcd> &a_grid,
                               const std::vector<SphereNode> &sphere);
/// Exact C f for band-limited f: f.heat(a, tau).
std::vector<cplx> sb_transform(const BandLimitedFunction &f, double tau,
                               const std::vector<Eigen::VectorXcd> &a_grid);

/// f(x) = int F(a(x, p)) nu(tau, p) (sinh p / p)^{d-1} dp over the fiber at x.
/// quad.measure selects the weight: inversion is correct, resolution is the
/// negative control.
cplx sb_inverse(const HoloFunction &F, const Eigen::VectorXd &x,
                const QuadratureSpec &quad);

/// int R_tau(a, b) F(b) nu(2 tau, 2p) beta(p) dp dx.
cplx reproducing_identity_check(const HoloFunction &F, const Eigen::VectorXcd &a,
                                const QuadratureSpec &quad);

/// int conj(rho_tau(a, x_out)) F(a) nu(2 tau, 2p) beta(p) dp dx, a = a(x, p).
/// F receives the node (a, x, p) so non-holomorphic inputs can be supplied.
using PhaseFunction3 = std::function<cplx(const Eigen::VectorXcd &,
                                          const Eigen::VectorXd &,
                                          const Eigen::VectorXd &)>;
cplx adjoint_inverse(const PhaseFunction3 &F, const Eigen::VectorXd &x_out,
                     const QuadratureSpec &quad);
std::vector<cplx> adjoint_inverse(const PhaseFunction3 &F,
                                  const std::vector<Eigen::VectorXd> &x_out,
                                  const QuadratureSpec &quad);

/// M_ij = int <e_i|psi_a><psi_a|e_j> w(p) dp dx with w from quad.measure.
Eigen::MatrixXcd resolve_identity_matrix(const BasisSpec &basis,
                                         const QuadratureSpec &quad);

/// G_ij = int conj(C f_i) C f_j w(p) dp dx and the sphere Gram matrix
/// int conj(f_i) f_j dx; returns max |G_phase - G_sphere|.
double isometry_deviation(const std::vector<BandLimitedFunction> &fs,
                          const QuadratureSpec &quad);

/// |C f(a)|^2 nu(2 tau, 2p) beta(p) at the grid nodes.
std::vector<double> husimi_density(const BandLimitedFunction &f,
                                   const PhaseGrid &grid, double tau);
/// Integral of the Husimi density over phase space.
double husimi_mass(const BandLimitedFunction &f, const QuadratureSpec &quad);
/// As above on a prebuilt resolution grid.
double husimi_mass(const BandLimitedFunction &f, const PhaseGrid &grid, double tau);

/// L^2(S^d) norm by the sphere rule.
double sphere_norm(const BandLimitedFunction &f, const std::vector<SphereNode> &sphere);

struct InvarianceReport {
  double rotation = 0.0;     // relative change of a test integral under R
  double radial_laplacian = 0.0; // worst radial Laplacian residual
  double sum_identity = 0.0; // worst |sum (a_k conj a_l - a_l conj a_k)^2 + |a|^4 - 1|
};

/// (i) int g(R x, R p) beta dp dx = int g beta dp dx for the given rotations;
/// (ii) sum V_kl^2 phi(2p) and its conjugate against
///      -[phi'' + (d-1) coth R phi'] at R = 2p for the given radii (phi even);
/// (iii) the sum identity at the given points of the unit complex sphere.
InvarianceReport invariance_measure_check(
    const QuadratureSpec &quad, const std::vector<Eigen::MatrixXd> &rotations,
    const std::function<double(double)> &phi,
    const std::function<double(double)> &dphi,
    const std::function<double(double)> &ddphi,
    const std::vector<double> &radii,
    const std::vector<Eigen::VectorXcd> &samples);

/// sum_{k<l} V_kl^2 f at a, V_kl = a_l d/da_k - a_k d/da_l (conj = false) or
/// its conjugate (conj = true), by complex-time finite differences of f along
/// the complex rotations of each (k, l) plane. J_a^2 is minus this sum.
cplx rotation_field_square_sum(
    const std::function<double(const Eigen::VectorXcd &)> &f,
    const Eigen::VectorXcd &a, bool conj, double h = 1e-2);

} // namespace sphcs
