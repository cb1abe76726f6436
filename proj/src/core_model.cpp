#include "sphcs/core_model.hpp"

#include <cmath>
#include <string>

namespace sphcs {

ModelParams ModelParams::make(int d, double r, double m, double omega,
                              double hbar) {
  if (d < 1)
    throw InvalidArgument("dimension d must be >= 1");
  if (!(r > 0) || !(m > 0) || !(omega > 0) || !(hbar > 0))
    throw InvalidArgument("r, m, omega and hbar must be positive");
  return ModelParams(d, r, m, omega, hbar);
}

ModelParams ModelParams::dimensionless(int d, double tau) {
  return make(d, 1.0, 1.0, 1.0, tau);
}

PhasePoint PhasePoint::make(const ModelParams &params, const Eigen::VectorXd &x,
                            const Eigen::VectorXd &p) {
  const int n = params.d() + 1;
  if (x.size() != n || p.size() != n)
    throw InvalidArgument("phase point vectors must have d+1 components");
  const double r = params.r();
  const double rx = std::abs(x.squaredNorm() - r * r) / (r * r);
  // x.p is measured against r |p| + eps so that p = 0 stays admissible.
  const double rp_scaled =
      std::abs(x.dot(p)) /
      (r * p.norm() + params.momentum_unit() * r * 1e-12);
  if (rx <= kTolConstraint && rp_scaled <= kTolConstraint)
    return PhasePoint(x, p);
  if (rx > kTolAdmission || rp_scaled > kTolAdmission)
    throw ConstraintViolation("phase point violates x^2 = r^2 or x.p = 0");
  Eigen::VectorXd xn = x * (r / x.norm());
  Eigen::VectorXd pn = p - xn * (xn.dot(p) / (r * r));
  return PhasePoint(std::move(xn), std::move(pn));
}

AngularMomentumMatrix angular_momentum(const PhasePoint &pt) {
  AngularMomentumMatrix out;
  out.j = pt.p() * pt.x().transpose() - pt.x() * pt.p().transpose();
  const auto n = out.j.rows();
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k + 1; l < n; ++l)
      out.j2 += out.j(k, l) * out.j(k, l);
  return out;
}

cplx bilinear_dot(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    s += a[k] * b[k];
  return s;
}

ComplexSpherePoint ComplexSpherePoint::make(double r,
                                            const Eigen::VectorXcd &a) {
  if (!(r > 0))
    throw InvalidArgument("radius must be positive");
  if (a.size() < 2)
    throw InvalidArgument("complex sphere point needs at least 2 components");
  const cplx s = bilinear_dot(a, a);
  const double res = std::abs(s - r * r) / (r * r);
  // Points far out on S^d_C carry a.a as a difference of large squares, so
  // the residual is measured against |a|^2 rather than r^2.
  const double scale = std::max(1.0, a.squaredNorm() / (r * r));
  if (res <= kTolConstraint * scale)
    return ComplexSpherePoint(r, a);
  if (res > kTolAdmission * scale)
    throw ConstraintViolation("point is not on the complexified sphere");
  return ComplexSpherePoint(r, a * (r / std::sqrt(s)));
}

ComplexSpherePoint ComplexSpherePoint::real(double r,
                                            const Eigen::VectorXd &x) {
  return make(r, x.cast<cplx>());
}

ComplexSpherePoint complexify(const ModelParams &params, const PhasePoint &pt) {
  const double r = params.r();
  const Eigen::VectorXd xt = pt.x() / r;
  const Eigen::VectorXd pt_ = pt.p() / params.momentum_unit();
  const double pn = pt_.norm();
  Eigen::VectorXcd a = (std::cosh(pn) * xt).cast<cplx>() +
                       kI * (sinhc(pn) * pt_).cast<cplx>();
  return ComplexSpherePoint::make(r, a * r);
}

ComplexSpherePoint complexify_series(const ModelParams &params,
                                     const PhasePoint &pt, int n_terms) {
  if (n_terms < 1)
    throw InvalidArgument("n_terms must be >= 1");
  const double r = params.r();
  const Eigen::MatrixXd jt =
      angular_momentum(pt).j / (params.m() * params.omega() * r * r);
  Eigen::VectorXcd term = pt.x().cast<cplx>();
  Eigen::VectorXcd sum = term;
  for (int n = 1; n < n_terms; ++n) {
    term = (kI / static_cast<double>(n)) * (jt.cast<cplx>() * term);
    sum += term;
  }
  // A partial sum is off S^d_C by the truncation error.
  return ComplexSpherePoint::unchecked(r, std::move(sum));
}

PhasePoint decomplexify(const ModelParams &params,
                        const ComplexSpherePoint &a) {
  const double r = params.r();
  const Eigen::VectorXcd &v = a.a();
  if (std::abs(a.r() - r) > kTolConstraint * r)
    throw InvalidArgument("complex point radius does not match parameters");
  const double excess = a.alpha() - r * r;
  if (excess < -kTolAdmission * r * r)
    throw ConstraintViolation("|a|^2 < r^2: not on the complexified sphere");
  const Eigen::VectorXd re = v.real();
  const Eigen::VectorXd im = v.imag();
  const double imn = im.norm();
  // a.a = r^2 gives |a|^2 - r^2 = 2 |Im a|^2 = 2 r^2 sinh^2(p~).
  const double pn = std::asinh(imn / r);
  Eigen::VectorXd x = re / std::cosh(pn);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(v.size());
  if (imn > 0)
    p = im * (params.momentum_unit() * pn / imn);
  return PhasePoint::make(params, x, p);
}

cplx complex_angle(const ComplexSpherePoint &a, const ComplexSpherePoint &x) {
  const cplx c = bilinear_dot(a.a(), x.a()) / (a.r() * x.r());
  return std::acos(c);
}

bool conjugation_symmetry_check(const ModelParams &params,
                                const PhasePoint &pt) {
  const ComplexSpherePoint plus = complexify(params, pt);
  const ComplexSpherePoint minus =
      complexify(params, PhasePoint::make(params, pt.x(), -pt.p()));
  const double scale = params.r() * std::max(1.0, std::sqrt(plus.alpha()) /
                                                      params.r());
  return (minus.a() - plus.a().conjugate()).cwiseAbs().maxCoeff() <=
         1e-14 * scale;
}

namespace {

// Richardson-extrapolated central difference of a scalar function of t.
cplx richardson_derivative(const std::function<cplx(double)> &f, double h) {
  auto central = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
  const cplx d1 = central(h), d2 = central(h / 2), d3 = central(h / 4);
  const cplx r1 = (4.0 * d2 - d1) / 3.0;
  const cplx r2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

} // namespace

cplx constrained_poisson_bracket(const ModelParams &params,
                                 const PhasePoint &pt, const PhaseFunction &f,
                                 const PhaseFunction &g) {
  const int n = params.d() + 1;
  const double r = params.r();
  const Eigen::VectorXd &x = pt.x();
  const Eigen::VectorXd &p = pt.p();
  const double hx = 1e-2 * r;
  const double hp = 1e-2 * params.momentum_unit();

  auto grad = [&](const PhaseFunction &fn, Eigen::VectorXcd &gx,
                  Eigen::VectorXcd &gp) {
    gx.resize(n);
    gp.resize(n);
    for (int k = 0; k < n; ++k) {
      gx[k] = richardson_derivative(
          [&](double t) {
            Eigen::VectorXd xs = x;
            xs[k] += t;
            return fn(xs, p);
          },
          hx);
      gp[k] = richardson_derivative(
          [&](double t) {
            Eigen::VectorXd ps = p;
            ps[k] += t;
            return fn(x, ps);
          },
          hp);
    }
  };
  Eigen::VectorXcd fx, fp, gx, gp;
  grad(f, fx, fp);
  grad(g, gx, gp);

  const Eigen::MatrixXd dxp =
      Eigen::MatrixXd::Identity(n, n) - x * x.transpose() / (r * r);
  const Eigen::MatrixXd dpp = angular_momentum(pt).j / (r * r);
  const Eigen::MatrixXcd cxp = dxp.cast<cplx>();
  const Eigen::MatrixXcd cpp = dpp.cast<cplx>();
  cplx out = (fx.transpose() * cxp * gp).value();
  out -= (gx.transpose() * cxp * fp).value();
  out += (fp.transpose() * cpp * gp).value();
  return out;
}

} // namespace sphcs
