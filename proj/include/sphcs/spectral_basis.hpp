#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sphcs/core_model.hpp"
#include "sphcs/harmonics.hpp"

namespace sphcs {

using MatList = std::vector<Eigen::MatrixXcd>;
using MatGrid = std::vector<MatList>;

/// Truncated matrices of the e(d+1) generators and derived operators.
/// Indices k, l run over 0..d (component k+1 in the usual notation).
struct OperatorSet {
  BasisSpec spec;
  double r = 1.0;
  double hbar = 1.0;
  Eigen::VectorXd lambda; // l(l+d-1), the eigenvalue of J^2 / hbar^2

  MatList X;
  MatGrid J; // J[k][l] = -J[l][k]
  Eigen::MatrixXcd J2, Jscalar;
  MatList P; // P_k = J_kl X_l / r^2
  MatGrid W;
  Eigen::MatrixXcd C;

  MatList A; // filled by build_annihilation
  double tau = 0.0;

  int dim() const { return spec.dim; }
  int n() const { return spec.size(); }
};

/// Builds X, J, J2, Jscalar, P, W and C. X is in units of r and J in units
/// of hbar taken from params.
OperatorSet build_basis(const BasisSpec &spec, const ModelParams &params);
/// Only lambda, X and J (enough for build_annihilation at large cutoffs).
OperatorSet build_position_operators(const BasisSpec &spec,
                                     const ModelParams &params);

/// A_k = E^{-1} X_k E with E = exp(tau J~^2 / 2), computed entrywise.
/// Throws OverflowGuard when tau * max(lambda) / 2 leaves the double range.
OperatorSet build_annihilation(OperatorSet ops, double tau);

/// A_k = e^{tau/2} [cosh(tau J~) + (d-1)/(2 J~) sinh(tau J~)] X_k
///       + i e^{tau/2} r^2 / (hbar J~) sinh(tau J~) P_k,
/// J~ = sqrt(J~^2 + (d-1)^2/4), functions of J~ acting from the left.
MatList build_annihilation_explicit(const OperatorSet &ops, double tau);

/// A = exp{(i J + hbar d / 2) tau / hbar} X with J reduced to the 2x2 matrix
/// [[0, -P^2], [r^2, i hbar (d-1)]] on (X, P), exponentiated per degree.
MatList build_annihilation_polar(const OperatorSet &ops, double tau);

/// Max |M_ij| over rows and columns of degree <= min(interior, cutoff - nx),
/// where nx counts the position-type factors in the product M came from.
double interior_norm(const OperatorSet &ops, const Eigen::MatrixXcd &M,
                     int nx);

/// As interior_norm, with entry (i, j) divided by
/// exp(power * tau * max(J~_i, J~_j)), the size of the operands in products
/// of `power` annihilation operators.
double scaled_interior_norm(const OperatorSet &ops, const Eigen::MatrixXcd &M,
                            int nx, double tau, int power);

struct CheckItem {
  std::string name;
  double residual = 0.0;
};

struct CheckReport {
  std::vector<CheckItem> items;
  double max_residual() const;
  void add(std::string name, double residual) {
    items.push_back({std::move(name), residual});
  }
};

/// max interior norm of W_kl over k < l.
double constraint_residual(const OperatorSet &ops);

/// e(d+1) commutators, X^2 = r^2, [X_k, P_l], P.X, X.P, JX, JP, [X, W],
/// [J, W], W = 0, W Hermitian and C = 0 on interior blocks.
CheckReport euclidean_algebra_check(const OperatorSet &ops);

/// sum A_k^2 = r^2, [A_k, A_l] = 0, explicit and polar forms against
/// E^{-1} X E. Residuals are scaled as in scaled_interior_norm. Also reports
/// the (unscaled) non-normality ||[A_1, A_1^dagger]|| as "nonnormality".
CheckReport annihilation_check(const OperatorSet &ops);

/// L = (J_32, J_13, J_21): interior norm of C - X^2 (L.X)^2 (d = 2 only).
double lx_casimir_check_d2(const OperatorSet &ops);
/// interior norm of L.X (d = 2 only).
double lx_residual_d2(const OperatorSet &ops);

} // namespace sphcs
