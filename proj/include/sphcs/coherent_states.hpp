#pragma once

#include <Eigen/Dense>

#include "sphcs/core_model.hpp"
#include "sphcs/harmonics.hpp"
#include "sphcs/heat_kernels.hpp"
#include "sphcs/spectral_basis.hpp"

namespace sphcs {

/// Unnormalized coherent state psi_a = e^{-tau J~^2 / 2} delta_a continued to
/// a in S^d_C. Wavefunctions and coefficients refer to the unit sphere with
/// its surface measure (lengths in units of r).
struct CoherentState {
  ComplexSpherePoint label;
  double tau = 0.5;

  static CoherentState at(const ModelParams &params, const PhasePoint &pt);
  static CoherentState at(const ComplexSpherePoint &a, double tau);
  int d() const { return label.d(); }
  /// a / r as a point of the unit complex sphere.
  Eigen::VectorXcd unit_label() const { return label.a() / label.r(); }
};

/// <delta_x | psi_a> = rho_tau(theta), cos theta = a.x / r^2.
cplx position_wavefunction(const CoherentState &s, const Eigen::VectorXd &x,
                           const TruncationSpec &trunc = {});

struct StateCoefficients {
  Eigen::VectorXcd c;
  double tail_estimate = 0.0; // ||psi||^2 outside the basis, relative
  bool tail_warning = false;  // tail_estimate > 1e-10
};

/// c_i = e^{-tau lambda_i / 2} conj(e_i)(a), lambda_i = l(l + d - 1).
StateCoefficients coefficients_in_basis(const CoherentState &s,
                                        const BasisSpec &basis);

/// R_tau(a, b) = <psi_b | psi_a> = rho_{2 tau} at the angle between a and
/// conj(b).
cplx reproducing_kernel(const ComplexSpherePoint &a, const ComplexSpherePoint &b,
                        double tau, const TruncationSpec &trunc = {});

/// ||psi_a||^2 = R_tau(a, a).
double norm_squared(const CoherentState &s);

/// Truncated-basis inner product <psi_2 | psi_1>.
cplx overlap(const CoherentState &s1, const CoherentState &s2,
             const BasisSpec &basis);

/// psi_a / sqrt(R_tau(a, a)).
cplx normalized_wavefunction(const CoherentState &s, const Eigen::VectorXd &x);
StateCoefficients normalized_coefficients(const CoherentState &s,
                                          const BasisSpec &basis);

/// sum over degrees l > cutoff of w_l e^{-tau lambda_l} G_l(|a|^2 / r^2),
/// the squared norm of the part of psi_a beyond the cutoff.
double norm_tail(int dim, double tau, double alpha, int cutoff);

/// Smallest cutoff with norm_tail <= rel_tol * ||psi||^2.
int certified_cutoff(int dim, double tau, double alpha, double rel_tol = 1e-20);

/// ||A_k c - a_k c|| / (|a_k| ||c||) with ops from build_annihilation at the
/// state's tau. |a_k| is floored at 1e-3 r.
double eigen_residual(const CoherentState &s, const OperatorSet &ops, int k);

/// Fourth-order finite-difference d/d(conj z) of the coefficients in the chart
/// z -> (z_1, ..., z_d, +-sqrt(r^2 - z.z)), relative to ||c||.
double holomorphy_residual(const CoherentState &s, const BasisSpec &basis,
                           double h = 1e-3);

/// ||c(R a) - U(R) c(a)|| / ||c(a)|| for R = exp(G), G real antisymmetric
/// (d+1)x(d+1), U(R) = exp(-i sum_{k<l} G_kl J_kl / hbar) from the basis
/// generators.
double rotation_covariance_residual(const CoherentState &s,
                                    const BasisSpec &basis,
                                    const Eigen::MatrixXd &G);

struct PeakReport {
  double peak_angle = 0.0;   // geodesic angle of the density maximum
  double width = 0.0;        // sqrt(<theta^2> / d) under |psi|^2 / ||psi||^2
  double expected_width = 0.0; // sqrt(tau / 2)
};

/// Position density of a real-label state along a geodesic from the label.
PeakReport peaking(const CoherentState &s);

} // namespace sphcs
