#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sphcs/numerics.hpp"

namespace sphcs {

/// Particle in R^d with the complexifier p^2 / (2 m omega).
class FlatParams {
public:
  static FlatParams make(int d, double m, double omega, double hbar);
  int d() const { return d_; }
  double m() const { return m_; }
  double omega() const { return omega_; }
  double hbar() const { return hbar_; }
  /// sigma = hbar / (m omega), the squared length scale.
  double sigma() const { return hbar_ / (m_ * omega_); }

private:
  FlatParams(int d, double m, double omega, double hbar)
      : d_(d), m_(m), omega_(omega), hbar_(hbar) {}
  int d_;
  double m_, omega_, hbar_;
};

/// a = x + i p / (m omega).
Eigen::VectorXcd flat_complexify(const FlatParams &params, const Eigen::VectorXd &x,
                                 const Eigen::VectorXd &p);

/// Truncated series sum_{j < n_terms} (i / 2 m omega)^j / j! ad^j(x_k^n) with
/// ad f = {f, p^2}. Exact once n_terms > n.
cplx flat_power_series(const FlatParams &params, const Eigen::VectorXd &x,
                       const Eigen::VectorXd &p, int k, int n, int n_terms);

/// <delta_x | psi_a> = (2 pi sigma)^{-d/2} exp(-(x - a)^2 / (2 sigma)).
cplx flat_coherent_wavefunction(const FlatParams &params, const Eigen::VectorXcd &a,
                                const Eigen::VectorXd &x);

/// gamma(a) = (pi sigma)^{-d/2} exp(-|Im a|^2 / sigma).
double flat_gamma(const FlatParams &params, const Eigen::VectorXd &im_a);
/// nu(s, a) = (2 pi s)^{-d/2} exp(-|Im a|^2 / (2 s)).
double flat_nu(int d, double s, const Eigen::VectorXd &im_a);

/// Hermite functions on the length scale sqrt(sigma). d = 1: index n;
/// d = 2: products h_{n1} h_{n2} ordered by total degree, then n1 descending.
struct HermiteBasis {
  int dim = 1;
  double sigma = 1.0;
  int count = 6;
  std::vector<std::array<int, 2>> index() const;
  /// Values of all basis functions at x.
  Eigen::VectorXd values(const Eigen::VectorXd &x) const;
};

/// h_n(x / sqrt(sigma)) sigma^{-1/4} for n = 0..n_max.
Eigen::VectorXd hermite_functions(int n_max, double sigma, double x);

struct FlatQuad {
  int nodes = 20;        // Gauss-Legendre nodes per panel, position integrals
  int panels = 8;
  int phase_nodes = 0;   // same for each real coordinate of a; 0: 24 (d=1), 16 (d=2)
  int phase_panels = 4;
  double half_width = 0; // in units of sqrt(sigma); 0: chosen from the basis
};

/// <h_i | psi_a> for every basis function, one coordinate at a time, by
/// quadrature in x.
Eigen::VectorXcd flat_overlaps(const HermiteBasis &basis, const Eigen::VectorXcd &a,
                               const FlatQuad &quad = {});

/// M_ij = int <h_i|psi_a><psi_a|h_j> gamma(a) da over C^d (d = 1, 2).
/// `weight` replaces gamma when given (negative controls).
Eigen::MatrixXcd flat_resolution_check(
    const FlatParams &params, const HermiteBasis &basis, const FlatQuad &quad = {},
    const std::function<double(const Eigen::VectorXd &)> &weight = {});

/// f(x) = int F(x + i y) nu(sigma, y) dy over R^d.
cplx flat_inverse(const FlatParams &params,
                  const std::function<cplx(const Eigen::VectorXcd &)> &F,
                  const Eigen::VectorXd &x, const FlatQuad &quad = {});

/// Truncated Hermite-basis matrices of X_k and P_k (d = 1, 2; tensor basis
/// n_k < cutoff) and the annihilation operators built from them.
struct FlatOperators {
  int dim = 1;
  int cutoff = 12;
  std::vector<Eigen::MatrixXcd> X, P;
  Eigen::MatrixXcd P2;
  int n() const { return static_cast<int>(P2.rows()); }
};
FlatOperators flat_operators(const FlatParams &params, int cutoff);
/// sum_{j < n_terms} ad^j_{P^2}(X_k) / ((2 m omega hbar)^j j!).
Eigen::MatrixXcd flat_annihilation_series(const FlatParams &params,
                                          const FlatOperators &ops, int k,
                                          int n_terms);
/// Rows and columns whose tensor indices are all below cutoff - margin.
std::vector<int> flat_interior(const FlatOperators &ops, int margin);

struct SmallTauReport {
  double tau = 0.0;
  double peak_discrepancy = 0.0; // |rho(0) - flat(0)| / flat(0)
  double sup_discrepancy = 0.0;  // sup over the sampled radii, same scale
  double sphere_width = 0.0;
  double flat_width = 0.0;       // sqrt(sigma / 2) / r
  double expected_width = 0.0;   // sqrt(tau / 2)
};

/// Sphere coherent state at the north pole (real label, radius 1) against the
/// flat Gaussian with sigma = tau, both as functions of geodesic distance.
SmallTauReport small_tau_limit_check(int dim, double tau, int samples = 200);

} // namespace sphcs
