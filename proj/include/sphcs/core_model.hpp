#pragma once

#include <Eigen/Dense>
#include <functional>

#include "sphcs/numerics.hpp"

namespace sphcs {

inline constexpr double kTolConstraint = 1e-10;
inline constexpr double kTolAdmission = 1e-6;

/// Physical constants of a particle on the sphere of radius r in R^{d+1}.
/// All internal computations use x/r and p/(m omega r), so only d and
/// tau = hbar / (m omega r^2) matter past this point.
class ModelParams {
public:
  static ModelParams make(int d, double r, double m, double omega,
                          double hbar);
  /// r = m = omega = 1, hbar = tau.
  static ModelParams dimensionless(int d, double tau);

  int d() const { return d_; }
  double r() const { return r_; }
  double m() const { return m_; }
  double omega() const { return omega_; }
  double hbar() const { return hbar_; }
  double tau() const { return hbar_ / (m_ * omega_ * r_ * r_); }
  /// m omega r, the momentum unit.
  double momentum_unit() const { return m_ * omega_ * r_; }

private:
  ModelParams(int d, double r, double m, double omega, double hbar)
      : d_(d), r_(r), m_(m), omega_(omega), hbar_(hbar) {}
  int d_;
  double r_, m_, omega_, hbar_;
};

/// Point (x, p) of T*(S^d) with x.x = r^2 and x.p = 0.
class PhasePoint {
public:
  /// Validates the constraints. Residuals below kTolAdmission are repaired by
  /// rescaling x onto the sphere and projecting p onto the tangent plane;
  /// larger residuals throw ConstraintViolation.
  static PhasePoint make(const ModelParams &params, const Eigen::VectorXd &x,
                         const Eigen::VectorXd &p);

  const Eigen::VectorXd &x() const { return x_; }
  const Eigen::VectorXd &p() const { return p_; }
  int d() const { return static_cast<int>(x_.size()) - 1; }

private:
  PhasePoint(Eigen::VectorXd x, Eigen::VectorXd p)
      : x_(std::move(x)), p_(std::move(p)) {}
  Eigen::VectorXd x_, p_;
};

struct AngularMomentumMatrix {
  Eigen::MatrixXd j; // j = p (x) x - x (x) p, antisymmetric
  double j2 = 0.0;   // sum_{k<l} j_kl^2
};

AngularMomentumMatrix angular_momentum(const PhasePoint &pt);

/// Point of the complexified sphere { a in C^{d+1} : a.a = r^2 }.
class ComplexSpherePoint {
public:
  static ComplexSpherePoint make(double r, const Eigen::VectorXcd &a);
  static ComplexSpherePoint real(double r, const Eigen::VectorXd &x);
  /// No constraint check; used for truncated series that are only close to
  /// the complex sphere.
  static ComplexSpherePoint unchecked(double r, Eigen::VectorXcd a) {
    return {r, std::move(a)};
  }

  const Eigen::VectorXcd &a() const { return a_; }
  double r() const { return r_; }
  int d() const { return static_cast<int>(a_.size()) - 1; }
  /// |a|^2 = sum |a_k|^2 >= r^2.
  double alpha() const { return a_.squaredNorm(); }
  ComplexSpherePoint conj() const { return {r_, a_.conjugate()}; }
  /// a / r, the point on the unit complex sphere.
  Eigen::VectorXcd unit() const { return a_ / r_; }

private:
  ComplexSpherePoint(double r, Eigen::VectorXcd a) : a_(std::move(a)), r_(r) {}
  Eigen::VectorXcd a_;
  double r_;
};

/// Bilinear (non-Hermitian) dot product a.b.
cplx bilinear_dot(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b);

ComplexSpherePoint complexify(const ModelParams &params, const PhasePoint &pt);

/// Partial sum of exp(i j / m omega r^2) x with n_terms terms.
ComplexSpherePoint complexify_series(const ModelParams &params,
                                     const PhasePoint &pt, int n_terms);

PhasePoint decomplexify(const ModelParams &params, const ComplexSpherePoint &a);

/// Principal theta with cos theta = a.x / r^2, Re theta in [0, pi].
cplx complex_angle(const ComplexSpherePoint &a, const ComplexSpherePoint &x);

/// complexify(x, -p) == conj(complexify(x, p)) elementwise to 1e-14 (relative
/// to r).
bool conjugation_symmetry_check(const ModelParams &params,
                                const PhasePoint &pt);

using PhaseFunction =
    std::function<cplx(const Eigen::VectorXd &, const Eigen::VectorXd &)>;

/// Poisson bracket on T*(S^d) from the constrained relations
///   {x_k, x_l} = 0, {x_k, p_l} = delta_kl - x_k x_l / r^2,
///   {p_k, p_l} = j_kl / r^2,
/// with partial derivatives of the ambient extensions of f and g taken by
/// central differences with Richardson extrapolation.
cplx constrained_poisson_bracket(const ModelParams &params,
                                 const PhasePoint &pt, const PhaseFunction &f,
                                 const PhaseFunction &g);

} // namespace sphcs
