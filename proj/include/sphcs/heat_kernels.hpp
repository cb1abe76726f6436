#pragma once

#include <string>
#include <utility>

#include "sphcs/numerics.hpp"

namespace sphcs {

enum class KernelMethod { theta_sum, spectral, auto_select };

const char *to_string(KernelMethod m);
KernelMethod kernel_method_from_string(const std::string &s);

struct TruncationSpec {
  int max_image_index = 64;   // cap on the theta-sum window half-width
  int max_degree = 4000;      // cap on the spectral cutoff
  int contour_nodes = 20;     // Gauss-Legendre nodes per contour panel (d=2)
  double target_abs_error = 1e-12;

  void validate() const;
};

struct KernelEvalRequest {
  int dim = 1;
  double time = 0.5; // tau for the sphere, s for hyperbolic space
  cplx argument{0.0, 0.0}; // angle theta (sphere) or radius R (hyperbolic)
  KernelMethod method = KernelMethod::auto_select;
  TruncationSpec truncation{};
};

/// A kernel value with its truncation certificate.
struct KernelValue {
  cplx value{};
  double error_bound = 0.0; // bound on the omitted terms / quadrature error
  int terms = 0;            // images, degrees or quadrature nodes used
  KernelMethod method = KernelMethod::theta_sum;
};

// theta_sum is used below this time and spectral at or above it when the
// method is auto_select.
inline constexpr double kAutoSpectralTau = 0.5;
inline constexpr double kSpectralMinTau = 0.05;

/// Heat kernel of S^d (unit radius, mass one under surface measure) at angle
/// theta, continued to complex theta. Dispatches on req.method.
KernelValue rho_sphere(const KernelEvalRequest &req);

/// Periodised-Gaussian form: d=1 image sum, d=2 contour integral of the
/// alternating image sum, d=3 image sum over sin theta.
KernelValue rho_sphere_theta(const KernelEvalRequest &req);

/// Zonal expansion sum_l w_l(d) exp(-tau l(l+d-1)/2) G_l(cos theta).
KernelValue rho_sphere_spectral(const KernelEvalRequest &req);

/// rho^3 from the d=1 kernel through
///   rho^{d+2} = -exp(d tau/2) / (2 pi sin theta) d/dtheta rho^d,
/// with the derivative taken analytically term by term. Returns
/// {recursion value, direct rho^3}.
std::pair<cplx, cplx> rho_recursion_check(int dim_from, double tau, cplx theta);

/// Heat kernel nu_d(s, R) of d-dimensional hyperbolic space.
KernelValue nu_hyperbolic(const KernelEvalRequest &req);
double nu_hyperbolic(int dim, double s, double R, double target_abs_error = 1e-13);

/// nu_3 built from nu_1 through the hyperbolic recursion.
double nu_recursion_d3(double s, double R);

/// c_d * int_0^inf nu_d(s, R) sinh(R)^{d-1} dR (must be 1).
double nu_normalization_check(int dim, double s);

/// Volume of the unit sphere S^{n-1} in R^n (c_1 = 2, c_2 = 2 pi, ...).
double unit_sphere_volume(int n);

/// Degree-l zonal polynomial of S^d: T_l (d=1), P_l (d=2), U_l (d=3),
/// Gegenbauer C_l^{(d-1)/2} for d >= 2 in general.
cplx gegenbauer_eval(int dim, int degree, cplx z);

/// Reproducing weight: sum over a degree-l eigenspace of Y(x) conj(Y(y))
/// equals zonal_weight(d, l) * G_l(x.y).
double zonal_weight(int dim, int degree);

/// l(l + d - 1), the eigenvalue of the dimensionless J^2 at degree l.
inline double casimir(int dim, int degree) {
  return static_cast<double>(degree) * (degree + dim - 1);
}

} // namespace sphcs
