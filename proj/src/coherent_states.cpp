#include "sphcs/coherent_states.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace sphcs {

using Eigen::VectorXcd;
using Eigen::VectorXd;

CoherentState CoherentState::at(const ModelParams &params, const PhasePoint &pt) {
  return {complexify(params, pt), params.tau()};
}

CoherentState CoherentState::at(const ComplexSpherePoint &a, double tau) {
  if (!(tau > 0))
    throw InvalidArgument("tau must be positive");
  return {a, tau};
}

namespace {

cplx kernel_at(int dim, double tau, cplx theta, const TruncationSpec &trunc) {
  KernelEvalRequest req;
  req.dim = dim;
  req.time = tau;
  req.argument = theta;
  req.truncation = trunc;
  return rho_sphere(req).value;
}

// Half the hyperbolic angle of a label: |a|^2 / r^2 = cosh(2 p).
double label_momentum(double alpha) {
  return 0.5 * std::acosh(std::max(1.0, alpha));
}

} // namespace

cplx position_wavefunction(const CoherentState &s, const VectorXd &x,
                           const TruncationSpec &trunc) {
  if (x.size() != s.d() + 1)
    throw InvalidArgument("point dimension does not match the state");
  const auto xp = ComplexSpherePoint::real(s.label.r(), x * (s.label.r() / x.norm()));
  return kernel_at(s.d(), s.tau, complex_angle(s.label, xp), trunc);
}

double norm_tail(int dim, double tau, double alpha, int cutoff) {
  // Upper bound G_l(cosh 2p) <= G_l(1) e^{2 l p}.
  const double p = label_momentum(alpha);
  double total = 0.0;
  for (int l = std::max(cutoff + 1, 0);; ++l) {
    const double g1 = dim == 3 ? l + 1.0 : 1.0;
    const double term =
        std::exp(std::log(zonal_weight(dim, l) * g1) + 2.0 * l * p - tau * casimir(dim, l));
    total += term;
    if (l > p / tau + 1 && term <= 1e-30 * total)
      break;
    if (l > cutoff + 100000)
      break;
  }
  return total;
}

int certified_cutoff(int dim, double tau, double alpha, double rel_tol) {
  const double norm = norm_tail(dim, tau, alpha, -1);
  int L = 2;
  while (norm_tail(dim, tau, alpha, L) > rel_tol * norm)
    ++L;
  return L;
}

StateCoefficients coefficients_in_basis(const CoherentState &s,
                                        const BasisSpec &basis) {
  basis.validate();
  if (basis.dim != s.d())
    throw UnsupportedDimension(basis.dim, "basis dimension does not match the state");
  StateCoefficients out;
  out.c = conj_basis_values(basis, s.unit_label());
  for (int i = 0; i < basis.size(); ++i)
    out.c[i] *= std::exp(-0.5 * s.tau * casimir(s.d(), basis.degree(i)));
  const double alpha = s.label.alpha() / (s.label.r() * s.label.r());
  out.tail_estimate = norm_tail(s.d(), s.tau, alpha, basis.cutoff) /
                      norm_tail(s.d(), s.tau, alpha, -1);
  out.tail_warning = out.tail_estimate > 1e-10;
  return out;
}

cplx reproducing_kernel(const ComplexSpherePoint &a, const ComplexSpherePoint &b,
                        double tau, const TruncationSpec &trunc) {
  if (a.d() != b.d())
    throw InvalidArgument("labels live on different spheres");
  const auto bbar = ComplexSpherePoint::unchecked(b.r(), b.a().conjugate());
  return kernel_at(a.d(), 2.0 * tau, complex_angle(a, bbar), trunc);
}

double norm_squared(const CoherentState &s) {
  return reproducing_kernel(s.label, s.label, s.tau).real();
}

cplx overlap(const CoherentState &s1, const CoherentState &s2,
             const BasisSpec &basis) {
  if (s1.tau != s2.tau)
    throw InvalidArgument("overlap needs states at the same tau");
  const auto c1 = coefficients_in_basis(s1, basis);
  const auto c2 = coefficients_in_basis(s2, basis);
  return c2.c.dot(c1.c); // conj(c2) . c1
}

cplx normalized_wavefunction(const CoherentState &s, const VectorXd &x) {
  return position_wavefunction(s, x) / std::sqrt(norm_squared(s));
}

StateCoefficients normalized_coefficients(const CoherentState &s,
                                          const BasisSpec &basis) {
  auto out = coefficients_in_basis(s, basis);
  out.c /= std::sqrt(norm_squared(s));
  return out;
}

double eigen_residual(const CoherentState &s, const OperatorSet &ops, int k) {
  if (ops.A.empty())
    throw InvalidArgument("annihilation operators not built");
  if (std::abs(ops.tau - s.tau) > 1e-15 * s.tau)
    throw InvalidArgument("operators were built at a different tau");
  if (std::abs(ops.r - s.label.r()) > 1e-15 * ops.r)
    throw InvalidArgument("operators were built at a different radius");
  const VectorXcd c = coefficients_in_basis(s, ops.spec).c;
  const cplx ak = s.label.a()[k];
  const double den = std::max(std::abs(ak), 1e-3 * ops.r) * c.norm();
  return (ops.A[k] * c - ak * c).norm() / den;
}

double holomorphy_residual(const CoherentState &s, const BasisSpec &basis,
                           double h) {
  const int d = s.d();
  const double r = s.label.r();
  const VectorXcd a0 = s.label.a();
  const cplx last = a0[d];
  auto coeffs = [&](const VectorXcd &z) {
    VectorXcd a(d + 1);
    a.head(d) = z;
    cplx w = std::sqrt(r * r - z.cwiseProduct(z).sum());
    if (std::abs(w - last) > std::abs(w + last))
      w = -w;
    a[d] = w;
    return coefficients_in_basis(
               CoherentState{ComplexSpherePoint::unchecked(r, a), s.tau}, basis)
        .c;
  };
  const VectorXcd z0 = a0.head(d);
  const double scale = coeffs(z0).norm();
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    VectorXcd e = VectorXcd::Zero(d);
    e[j] = h;
    auto deriv = [&](const VectorXcd &step) -> VectorXcd {
      return (8.0 * (coeffs(z0 + step) - coeffs(z0 - step)) -
              (coeffs(z0 + 2.0 * step) - coeffs(z0 - 2.0 * step))) /
             (12 * h);
    };
    const VectorXcd dx = deriv(e);
    const VectorXcd dy = deriv(kI * e);
    worst = std::max(worst, (0.5 * (dx + kI * dy)).norm() / scale);
  }
  return worst;
}

double rotation_covariance_residual(const CoherentState &s,
                                    const BasisSpec &basis,
                                    const Eigen::MatrixXd &G) {
  const int D = s.d() + 1;
  if (G.rows() != D || G.cols() != D || (G + G.transpose()).norm() > 1e-14)
    throw InvalidArgument("rotation generator must be antisymmetric of size d+1");
  const auto ops = build_position_operators(basis, ModelParams::make(s.d(), 1, 1, 1, 1));
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(ops.n(), ops.n());
  for (int k = 0; k < D; ++k)
    for (int l = k + 1; l < D; ++l)
      gen += G(k, l) * ops.J[k][l];
  const Eigen::MatrixXcd U = (-kI * gen).exp();
  const Eigen::MatrixXd R = G.exp();
  const VectorXcd ra = R.cast<cplx>() * s.label.a();
  const CoherentState rs{ComplexSpherePoint::unchecked(s.label.r(), ra), s.tau};
  const VectorXcd c = coefficients_in_basis(s, basis).c;
  return (coefficients_in_basis(rs, basis).c - U * c).norm() / c.norm();
}

PeakReport peaking(const CoherentState &s) {
  if (s.label.a().imag().norm() > 1e-12 * s.label.r())
    throw InvalidArgument("peaking is defined for real labels");
  const int d = s.d();
  auto rho = [&](double th) { return kernel_at(d, s.tau, th, {}).real(); };
  PeakReport rep;
  double best = -1.0;
  constexpr int kGrid = 2000;
  for (int i = 0; i <= kGrid; ++i) {
    const double th = kPi * i / kGrid;
    const double v = rho(th) * rho(th);
    if (v > best) {
      best = v;
      rep.peak_angle = th;
    }
  }
  const std::function<double(double)> mass = [&](double th) {
    const double v = rho(th);
    return v * v * std::pow(std::sin(th), d - 1);
  };
  const std::function<double(double)> second = [&](double th) {
    return th * th * mass(th);
  };
  const double m0 = integrate_adaptive(mass, 0.0, kPi, 1e-12 * best).value;
  const double m2 = integrate_adaptive(second, 0.0, kPi, 1e-12 * best).value;
  rep.width = std::sqrt(m2 / m0 / d);
  rep.expected_width = std::sqrt(0.5 * s.tau);
  return rep;
}

} // namespace sphcs
