#include "sphcs/bargmann_transform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sphcs {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

const char *to_string(FiberMeasure m) {
  return m == FiberMeasure::resolution ? "resolution" : "inversion";
}

std::vector<SphereNode> sphere_rule(int dim, int order) {
  if (order < 1)
    throw InvalidArgument("sphere rule order must be >= 1");
  const int nu = 2 * order + 1;
  const Rule t = periodic_trapezoid(nu);
  std::vector<SphereNode> out;
  VectorXd x(dim + 1);
  if (dim == 1) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      x << std::cos(t.x[i]), std::sin(t.x[i]);
      out.push_back({x, t.w[i]});
    }
  } else if (dim == 2) {
    const Rule &g = gauss_legendre(order);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double z = g.x[i], s = std::sqrt(1 - z * z);
      for (std::size_t j = 0; j < t.size(); ++j) {
        x << s * std::cos(t.x[j]), s * std::sin(t.x[j]), z;
        out.push_back({x, g.w[i] * t.w[j]});
      }
    }
  } else if (dim == 3) {
    const Rule g = gauss_legendre(order, 0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double c = std::sqrt(1 - g.x[i]), s = std::sqrt(g.x[i]);
      for (std::size_t j = 0; j < t.size(); ++j)
        for (std::size_t k = 0; k < t.size(); ++k) {
          x << c * std::cos(t.x[j]), c * std::sin(t.x[j]), s * std::cos(t.x[k]),
              s * std::sin(t.x[k]);
          out.push_back({x, 0.5 * g.w[i] * t.w[j] * t.w[k]});
        }
    }
  } else {
    throw UnsupportedDimension(dim, "sphere rules exist for d = 1, 2, 3");
  }
  return out;
}

namespace {

// Directions on S^{d-1}.
std::vector<SphereNode> direction_rule(int dim, int order) {
  if (dim == 1) {
    VectorXd u(1);
    u << 1.0;
    return {{u, 1.0}, {-u, 1.0}};
  }
  if (dim == 2) {
    std::vector<SphereNode> out;
    const Rule t = periodic_trapezoid(2 * order + 1);
    VectorXd u(2);
    for (std::size_t i = 0; i < t.size(); ++i) {
      u << std::cos(t.x[i]), std::sin(t.x[i]);
      out.push_back({u, t.w[i]});
    }
    return out;
  }
  return sphere_rule(dim - 1, order);
}

double sinh_ratio(double p) { return p == 0.0 ? 1.0 : sinhc(p); }

cplx kernel(int dim, double tau, cplx cos_theta) {
  KernelEvalRequest req;
  req.dim = dim;
  req.time = tau;
  req.argument = std::acos(cos_theta);
  if (dim == 2 && tau >= kSpectralMinTau)
    req.method = KernelMethod::spectral;
  return rho_sphere(req).value;
}

} // namespace

double PhaseDensity::beta(double p) const {
  return std::pow(2.0, dim) * std::pow(sinh_ratio(2 * p), dim - 1);
}

double PhaseDensity::weight(double p) const {
  if (kind == FiberMeasure::resolution)
    return nu_hyperbolic(dim, 2 * tau, 2 * p) * beta(p);
  return nu_hyperbolic(dim, tau, p) * std::pow(sinh_ratio(p), dim - 1);
}

double PhaseDensity::c_d() const { return unit_sphere_volume(dim); }

QuadratureSpec QuadratureSpec::make(int dim, double tau, int max_degree,
                                    FiberMeasure measure, const QuadOptions &opt) {
  if (dim < 1 || dim > 3)
    throw UnsupportedDimension(dim, "phase-space quadrature exists for d = 1, 2, 3");
  if (!(tau > 0))
    throw InvalidArgument("tau must be positive");
  if (max_degree < 0)
    throw InvalidArgument("max_degree must be >= 0");
  if (opt.radial_nodes < 2 || opt.radial_panels < 1 || !(opt.decay_target > 0))
    throw InvalidArgument("invalid radial rule options");
  QuadratureSpec q;
  q.dim = dim;
  q.tau = tau;
  q.max_degree = max_degree;
  q.measure = measure;
  const int so = opt.sphere_order > 0 ? opt.sphere_order : max_degree + 2;
  const int ao = opt.angular_order > 0 ? opt.angular_order : max_degree + 2;
  q.sphere = sphere_rule(dim, so);
  q.directions = direction_rule(dim, ao);

  // log of density * growth ~ -p^2 / (g tau) + g (L + d - 1) p
  const double g = measure == FiberMeasure::resolution ? 2.0 : 1.0;
  const double k = max_degree + dim - 1;
  const double peak = tau * k;
  const double log_target = -std::log(opt.decay_target);
  q.p_max = peak + std::sqrt(g * tau * log_target);
  const PhaseDensity dens{dim, tau, measure};
  auto log_size = [&](double p) {
    const double w = dens.weight(p);
    return (w > 0 ? std::log(w) : -1e300) + g * max_degree * p +
           (dim - 1) * std::log(std::max(p, 1e-300));
  };
  double best = -1e300;
  for (int i = 1; i <= 200; ++i)
    best = std::max(best, log_size(q.p_max * i / 200.0));
  int tries = 0;
  while (log_size(q.p_max) - best > -log_target + std::log(10.0)) {
    q.p_max *= 1.1;
    if (++tries > 30)
      throw CutoffInsufficient("no momentum cutoff meets the decay target");
  }
  q.radial = gauss_legendre(opt.radial_nodes, 0.0, q.p_max, opt.radial_panels);
  return q;
}

double QuadratureSpec::sphere_volume() const {
  double s = 0.0;
  for (const auto &n : sphere)
    s += n.w;
  return s;
}

Eigen::MatrixXd tangent_frame(const VectorXd &x) {
  // Householder reflection taking the last axis to x.
  const int n = static_cast<int>(x.size());
  VectorXd v = x / x.norm();
  v[n - 1] -= 1.0;
  MatrixXd H = MatrixXd::Identity(n, n);
  const double vv = v.squaredNorm();
  if (vv > 1e-30)
    H -= 2.0 * v * v.transpose() / vv;
  return H.leftCols(n - 1);
}

VectorXcd phase_to_complex(const VectorXd &x, const VectorXd &p) {
  const double pn = p.norm();
  return std::cosh(pn) * x.cast<cplx>() + kI * sinh_ratio(pn) * p.cast<cplx>();
}

namespace {

PhaseGrid build_grid(const QuadratureSpec &quad, const PhaseDensity &density,
                     const std::vector<SphereNode> &sphere) {
  PhaseGrid g;
  g.dim = quad.dim;
  std::vector<double> rw(quad.radial.size());
  for (std::size_t r = 0; r < rw.size(); ++r)
    rw[r] = density.weight(quad.radial.x[r]);
  const std::size_t total = sphere.size() * quad.directions.size() * rw.size();
  g.x.reserve(total);
  g.p.reserve(total);
  g.a.reserve(total);
  g.w.reserve(total);
  g.density.reserve(total);
  for (const auto &s : sphere) {
    const MatrixXd frame = tangent_frame(s.x);
    for (const auto &u : quad.directions) {
      const VectorXd dir = frame * u.x;
      for (std::size_t r = 0; r < rw.size(); ++r) {
        const double rho = quad.radial.x[r];
        const VectorXd p = rho * dir;
        g.x.push_back(s.x);
        g.p.push_back(p);
        g.a.push_back(phase_to_complex(s.x, p));
        g.density.push_back(rw[r]);
        g.w.push_back(s.w * u.w * quad.radial.w[r] * std::pow(rho, quad.dim - 1) * rw[r]);
      }
    }
  }
  return g;
}

} // namespace

PhaseGrid phase_grid(const QuadratureSpec &quad, const PhaseDensity &density) {
  return build_grid(quad, density, quad.sphere);
}

PhaseGrid fiber_grid(const QuadratureSpec &quad, const PhaseDensity &density,
                     const VectorXd &x) {
  return build_grid(quad, density, {{x / x.norm(), 1.0}});
}

// ---------------------------------------------------------------------------

BandLimitedFunction BandLimitedFunction::from_basis(const BasisSpec &b, VectorXcd c) {
  b.validate();
  if (c.size() != b.size())
    throw InvalidArgument("coefficient vector does not match the basis");
  BandLimitedFunction f;
  f.dim = b.dim;
  f.basis = b;
  f.coeffs = std::move(c);
  return f;
}

BandLimitedFunction BandLimitedFunction::null_harmonic(int dim, VectorXcd u, int degree,
                                                       cplx coeff) {
  if (u.size() != dim + 1)
    throw InvalidArgument("null vector has the wrong dimension");
  if (std::abs(u.cwiseProduct(u).sum()) > 1e-12 * u.squaredNorm())
    throw InvalidArgument("u . u must vanish");
  if (degree < 0)
    throw InvalidArgument("degree must be >= 0");
  BandLimitedFunction f;
  f.dim = dim;
  f.basis.dim = dim;
  f.terms.push_back({coeff, std::move(u), degree});
  return f;
}

BandLimitedFunction BandLimitedFunction::harmonic(int dim, int l, int m) {
  if (l < 0)
    throw InvalidArgument("degree must be >= 0");
  if (dim == 1 || dim == 2) {
    BasisSpec b{dim, std::max(l, 2), -1};
    if (dim == 2 && std::abs(m) > l)
      throw InvalidArgument("|m| must not exceed l");
    VectorXcd c = VectorXcd::Zero(b.size());
    c[dim == 1 ? b.index(0, m < 0 ? -l : l) : b.index(l, m)] = 1.0;
    return from_basis(b, c);
  }
  if (dim != 3)
    throw UnsupportedDimension(dim, "harmonic presets exist for d = 1, 2, 3");
  VectorXcd u = VectorXcd::Zero(4);
  switch (((m % 3) + 3) % 3) {
  case 0: u << 1.0, kI, 0.0, 0.0; break;
  case 1: u << 0.0, 0.0, 1.0, kI; break;
  default: u << 1.0 / std::sqrt(2.0), 0.0, kI / std::sqrt(2.0), 0.0; break;
  }
  return null_harmonic(3, u, l, std::sqrt((l + 1.0) / (2 * kPi * kPi)));
}

BandLimitedFunction BandLimitedFunction::random(int dim, int max_degree,
                                                std::uint64_t seed) {
  if (max_degree < 0)
    throw InvalidArgument("degree must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  auto draw = [&] { return cplx(n01(rng), n01(rng)); };
  if (dim == 3) {
    BandLimitedFunction f = harmonic(3, 0, 0).scaled(draw());
    for (int l = 1; l <= max_degree; ++l)
      for (int m = 0; m < 3; ++m)
        f += harmonic(3, l, m).scaled(draw());
    return f.scaled(1.0 / sphere_norm(f, sphere_rule(3, max_degree + 2)));
  }
  if (dim != 1 && dim != 2)
    throw UnsupportedDimension(dim, "random presets exist for d = 1, 2, 3");
  BasisSpec b{dim, std::max(max_degree, 2), -1};
  VectorXcd c = VectorXcd::Zero(b.size());
  for (int i = 0; i < b.size(); ++i)
    if (b.degree(i) <= max_degree)
      c[i] = draw();
  return from_basis(b, c / c.norm());
}

int BandLimitedFunction::max_degree() const {
  int top = 0;
  for (int i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0.0)
      top = std::max(top, basis.degree(i));
  for (const auto &t : terms)
    top = std::max(top, t.degree);
  return top;
}

cplx BandLimitedFunction::heat(const VectorXcd &a, double t) const {
  cplx s = 0.0;
  if (coeffs.size() > 0) {
    const VectorXcd v = basis_values(basis, a);
    for (int i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0.0)
        s += coeffs[i] * v[i] * std::exp(-0.5 * t * casimir(dim, basis.degree(i)));
  }
  for (const auto &tm : terms)
    s += tm.coeff * std::pow(tm.u.cwiseProduct(a).sum(), tm.degree) *
         std::exp(-0.5 * t * casimir(dim, tm.degree));
  return s;
}

cplx BandLimitedFunction::operator()(const VectorXcd &a) const { return heat(a, 0.0); }

BandLimitedFunction &BandLimitedFunction::operator+=(const BandLimitedFunction &o) {
  if (o.dim != dim)
    throw InvalidArgument("cannot add functions on different spheres");
  if (o.coeffs.size() > 0) {
    if (coeffs.size() == 0) {
      basis = o.basis;
      coeffs = o.coeffs;
    } else {
      if (o.basis.cutoff > basis.cutoff) {
        BasisSpec nb = o.basis;
        VectorXcd c = VectorXcd::Zero(nb.size());
        for (int i = 0; i < coeffs.size(); ++i)
          c[nb.index(basis.degree(i), basis.order(i))] = coeffs[i];
        basis = nb;
        coeffs = c;
      }
      for (int i = 0; i < o.coeffs.size(); ++i)
        coeffs[basis.index(o.basis.degree(i), o.basis.order(i))] += o.coeffs[i];
    }
  }
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

BandLimitedFunction BandLimitedFunction::scaled(cplx s) const {
  BandLimitedFunction f = *this;
  f.coeffs *= s;
  for (auto &t : f.terms)
    t.coeff *= s;
  return f;
}

// ---------------------------------------------------------------------------

std::vector<cplx> sb_transform(const SphereFunction &f, double tau,
                               const std::vector<VectorXcd> &a_grid,
                               const std::vector<SphereNode> &sphere) {
  if (a_grid.empty())
    return {};
  const int dim = static_cast<int>(a_grid.front().size()) - 1;
  std::vector<cplx> fx(sphere.size());
  for (std::size_t j = 0; j < sphere.size(); ++j)
    fx[j] = sphere[j].w * f(sphere[j].x);
  std::vector<cplx> out(a_grid.size());
  parallel_for(a_grid.size(), [&](std::size_t i) {
    std::vector<cplx> terms(sphere.size());
    for (std::size_t j = 0; j < sphere.size(); ++j)
      terms[j] = fx[j] == 0.0 ? cplx(0.0)
                              : kernel(dim, tau, a_grid[i].cwiseProduct(sphere[j].x.cast<cplx>()).sum()) * fx[j];
    out[i] = pairwise_sum(terms);
  });
  return out;
}

std::vector<cplx> sb_transform(const BandLimitedFunction &f, double tau,
                               const std::vector<VectorXcd> &a_grid) {
  std::vector<cplx> out(a_grid.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i)
    out[i] = f.heat(a_grid[i], tau);
  return out;
}

cplx sb_inverse(const HoloFunction &F, const VectorXd &x, const QuadratureSpec &quad) {
  const PhaseGrid g = fiber_grid(quad, {quad.dim, quad.tau, quad.measure}, x);
  return parallel_sum<cplx>(g.size(), [&](std::size_t i) { return g.w[i] * F(g.a[i]); });
}

cplx reproducing_identity_check(const HoloFunction &F, const VectorXcd &a,
                                const QuadratureSpec &quad) {
  const PhaseGrid g = phase_grid(quad, {quad.dim, quad.tau, quad.measure});
  return parallel_sum<cplx>(g.size(), [&](std::size_t i) {
    const cplx c = a.cwiseProduct(g.a[i].conjugate()).sum();
    return g.w[i] * kernel(quad.dim, 2 * quad.tau, c) * F(g.a[i]);
  });
}

std::vector<cplx> adjoint_inverse(const PhaseFunction3 &F,
                                  const std::vector<VectorXd> &x_out,
                                  const QuadratureSpec &quad) {
  const PhaseGrid g = phase_grid(quad, {quad.dim, quad.tau, quad.measure});
  std::vector<cplx> fv(g.size());
  parallel_for(g.size(), [&](std::size_t i) { fv[i] = g.w[i] * F(g.a[i], g.x[i], g.p[i]); });
  std::vector<cplx> out;
  for (const auto &xo : x_out) {
    const VectorXd xu = xo / xo.norm();
    out.push_back(parallel_sum<cplx>(g.size(), [&](std::size_t i) {
      if (fv[i] == 0.0)
        return cplx(0.0);
      const cplx c = g.a[i].cwiseProduct(xu.cast<cplx>()).sum();
      return std::conj(kernel(quad.dim, quad.tau, c)) * fv[i];
    }));
  }
  return out;
}

cplx adjoint_inverse(const PhaseFunction3 &F, const VectorXd &x_out,
                     const QuadratureSpec &quad) {
  return adjoint_inverse(F, std::vector<VectorXd>{x_out}, quad).front();
}

MatrixXcd resolve_identity_matrix(const BasisSpec &basis, const QuadratureSpec &quad) {
  basis.validate();
  if (basis.dim != quad.dim)
    throw InvalidArgument("basis and quadrature dimensions differ");
  if (basis.cutoff > quad.max_degree)
    throw CutoffInsufficient("basis degree " + std::to_string(basis.cutoff) +
                             " exceeds the quadrature's certified degree " +
                             std::to_string(quad.max_degree));
  const PhaseGrid g = phase_grid(quad, {quad.dim, quad.tau, quad.measure});
  const int n = basis.size();
  VectorXd damp(n);
  for (int i = 0; i < n; ++i)
    damp[i] = std::exp(-0.5 * quad.tau * casimir(basis.dim, basis.degree(i)));
  return parallel_sum<MatrixXcd>(
      g.size(),
      [&](std::size_t k) -> MatrixXcd {
        const VectorXcd c = damp.cast<cplx>().cwiseProduct(conj_basis_values(basis, g.a[k]));
        return g.w[k] * (c * c.adjoint());
      },
      MatrixXcd::Zero(n, n));
}

double isometry_deviation(const std::vector<BandLimitedFunction> &fs,
                          const QuadratureSpec &quad) {
  const int n = static_cast<int>(fs.size());
  const PhaseGrid g = phase_grid(quad, {quad.dim, quad.tau, quad.measure});
  const MatrixXcd gp = parallel_sum<MatrixXcd>(
      g.size(),
      [&](std::size_t k) -> MatrixXcd {
        VectorXcd v(n);
        for (int i = 0; i < n; ++i)
          v[i] = fs[i].heat(g.a[k], quad.tau);
        return g.w[k] * (v.conjugate() * v.transpose());
      },
      MatrixXcd::Zero(n, n));
  MatrixXcd gs = MatrixXcd::Zero(n, n);
  for (const auto &s : quad.sphere) {
    VectorXcd v(n);
    for (int i = 0; i < n; ++i)
      v[i] = fs[i](s.x.cast<cplx>());
    gs += s.w * (v.conjugate() * v.transpose());
  }
  return (gp - gs).cwiseAbs().maxCoeff();
}

std::vector<double> husimi_density(const BandLimitedFunction &f, const PhaseGrid &grid,
                                   double tau) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    out[i] = std::norm(f.heat(grid.a[i], tau)) * grid.density[i];
  });
  return out;
}

double husimi_mass(const BandLimitedFunction &f, const PhaseGrid &grid, double tau) {
  return parallel_sum<double>(grid.size(), [&](std::size_t i) {
    return grid.w[i] * std::norm(f.heat(grid.a[i], tau));
  });
}

double husimi_mass(const BandLimitedFunction &f, const QuadratureSpec &quad) {
  return husimi_mass(f, phase_grid(quad, {quad.dim, quad.tau, FiberMeasure::resolution}),
                     quad.tau);
}

double sphere_norm(const BandLimitedFunction &f, const std::vector<SphereNode> &sphere) {
  double s = 0.0;
  for (const auto &n : sphere)
    s += n.w * std::norm(f(n.x.cast<cplx>()));
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

cplx rotation_field_square_sum(const std::function<double(const VectorXcd &)> &f,
                               const VectorXcd &a, bool conj, double h) {
  const int D = static_cast<int>(a.size());
  auto second = [&](int k, int l, double step) {
    auto g = [&](cplx t) {
      VectorXcd b = a;
      const cplx c = std::cos(t), s = std::sin(t);
      b[k] = c * a[k] + s * a[l];
      b[l] = c * a[l] - s * a[k];
      return f(b);
    };
    const double g0 = g(0.0);
    const double gss = (g(step) - 2 * g0 + g(-step)) / (step * step);
    const double guu = (g(kI * step) - 2 * g0 + g(-kI * step)) / (step * step);
    const double gsu = (g(cplx(step, step)) - g(cplx(step, -step)) - g(cplx(-step, step)) +
                        g(cplx(-step, -step))) /
                       (4 * step * step);
    const cplx mixed = conj ? cplx(0, 2 * gsu) : cplx(0, -2 * gsu);
    return 0.25 * (gss - guu + mixed);
  };
  cplx total = 0.0;
  for (int k = 0; k < D; ++k)
    for (int l = k + 1; l < D; ++l)
      total += (4.0 * second(k, l, 0.5 * h) - second(k, l, h)) / 3.0;
  return total;
}

InvarianceReport invariance_measure_check(
    const QuadratureSpec &quad, const std::vector<MatrixXd> &rotations,
    const std::function<double(double)> &phi, const std::function<double(double)> &dphi,
    const std::function<double(double)> &ddphi, const std::vector<double> &radii,
    const std::vector<VectorXcd> &samples) {
  InvarianceReport rep;
  const int d = quad.dim, D = d + 1;
  const PhaseDensity beta_only{d, quad.tau, FiberMeasure::resolution};
  // Test integrand: polynomial in (x, p) with Gaussian decay, beta(p) weight.
  auto test = [&](const VectorXd &x, const VectorXd &p) {
    return (1.0 + x[0] + 0.5 * x[D - 1] * x[0] + p[0] * x[1 % D] + 0.3 * p[D - 1] * p[0]) *
           std::exp(-p.squaredNorm());
  };
  auto integral = [&](const MatrixXd &R) {
    return parallel_sum<double>(quad.sphere.size(), [&](std::size_t i) {
      const auto &s = quad.sphere[i];
      const MatrixXd frame = tangent_frame(s.x);
      double acc = 0.0;
      for (const auto &u : quad.directions)
        for (std::size_t r = 0; r < quad.radial.size(); ++r) {
          const double rho = quad.radial.x[r];
          const VectorXd p = rho * (frame * u.x);
          acc += u.w * quad.radial.w[r] * std::pow(rho, d - 1) * beta_only.beta(rho) *
                 test(R * s.x, R * p);
        }
      return s.w * acc;
    });
  };
  const double base = integral(MatrixXd::Identity(D, D));
  for (const auto &R : rotations)
    rep.rotation = std::max(rep.rotation, std::abs(integral(R) - base) / std::abs(base));

  // Radial functions phi(2p) evaluated at points a(x, p) with |p| = R/2.
  const std::function<double(const VectorXcd &)> radial = [&](const VectorXcd &a) {
    return phi(std::acosh(a.squaredNorm()));
  };
  VectorXd x = VectorXd::Zero(D), dir = VectorXd::Zero(D);
  x[D - 1] = 1.0;
  dir[0] = 1.0;
  for (double R : radii) {
    const VectorXcd a = phase_to_complex(x, 0.5 * R * dir);
    const double want = -(ddphi(R) + (d - 1) * std::cosh(R) / std::sinh(R) * dphi(R));
    const double scale = std::max(1.0, std::abs(want));
    for (bool conj : {false, true})
      rep.radial_laplacian = std::max(
          rep.radial_laplacian, std::abs(rotation_field_square_sum(radial, a, conj) - want) / scale);
  }

  for (const auto &a : samples) {
    cplx s = 0.0;
    for (int k = 0; k < D; ++k)
      for (int l = k + 1; l < D; ++l) {
        const cplx t = a[k] * std::conj(a[l]) - a[l] * std::conj(a[k]);
        s += t * t;
      }
    const double n2 = a.squaredNorm();
    rep.sum_identity = std::max(rep.sum_identity, std::abs(s + (n2 * n2 - 1.0)) / (n2 * n2));
  }
  return rep;
}

} // namespace sphcs
