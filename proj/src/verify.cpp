#include "sphcs/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "sphcs/bargmann_transform.hpp"
#include "sphcs/flat_space.hpp"
#include "sphcs/heat_kernels.hpp"

namespace sphcs {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

bool VerifyCheck::pass() const {
  if (informational)
    return true;
  if (!std::isfinite(residual))
    return false;
  return bound == Bound::at_most ? residual <= tolerance : residual > tolerance;
}

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck &c) { return c.pass(); });
}

const std::vector<std::string> &suite_names() {
  static const std::vector<std::string> names = {
      "complexifier", "kernels", "operators", "coherent",
      "resolution",   "transform", "flat",    "husimi"};
  return names;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Recorder {
  SuiteResult &out;
  const VerifyOptions &opt;

  bool want(int d) const {
    return opt.dims.empty() ||
           std::find(opt.dims.begin(), opt.dims.end(), d) != opt.dims.end();
  }
  std::vector<double> taus(std::vector<double> defaults) const {
    return opt.tau ? std::vector<double>{*opt.tau} : defaults;
  }
  // A failing library call is recorded as an infinite residual.
  void check(const std::string &name, double tol, const std::function<double()> &f,
             Bound bound = Bound::at_most, bool info = false) {
    double r;
    std::string label = name;
    try {
      r = f();
    } catch (const std::exception &e) {
      r = kInf;
      label += " [" + std::string(e.what()) + "]";
    }
    out.checks.push_back({out.suite, label, r, tol, bound, info});
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string tag(int d, double tau) {
  return "d=" + std::to_string(d) + " tau=" + num(tau);
}

VectorXd random_unit(int n, std::mt19937_64 &rng) {
  std::normal_distribution<double> n01;
  VectorXd x(n);
  for (int k = 0; k < n; ++k)
    x[k] = n01(rng);
  return x / x.norm();
}

PhasePoint random_point(const ModelParams &pr, std::mt19937_64 &rng, double pmax) {
  std::uniform_real_distribution<double> u01;
  const int n = pr.d() + 1;
  VectorXd x = random_unit(n, rng) * pr.r();
  VectorXd v = random_unit(n, rng);
  v -= x * (x.dot(v) / x.squaredNorm());
  v *= pmax * u01(rng) * pr.momentum_unit() / v.norm();
  return PhasePoint::make(pr, x, v);
}

KernelEvalRequest kreq(int d, double tau, cplx th, KernelMethod m) {
  KernelEvalRequest q;
  q.dim = d;
  q.time = tau;
  q.argument = th;
  q.method = m;
  return q;
}

double identity_deviation(const MatrixXcd &M) {
  return (M - MatrixXcd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

void complexifier_suite(Recorder &rec) {
  std::mt19937_64 rng(rec.opt.seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int d = 1; d <= 3; ++d) {
    if (!rec.want(d))
      continue;
    double sum_sq = 0, series = 0, conj = 0;
    for (int t = 0; t < 200; ++t) {
      const double r = u(rng), m = u(rng), w = u(rng);
      const double tau = rec.opt.tau.value_or(u(rng) - 0.4);
      const auto pr = ModelParams::make(d, r, m, w, tau * m * w * r * r);
      const auto pt = random_point(pr, rng, 1.5);
      const auto a = complexify(pr, pt);
      sum_sq = std::max(sum_sq, std::abs(bilinear_dot(a.a(), a.a()) - r * r) / (r * r));
      series = std::max(series, (complexify_series(pr, pt, 40).a() - a.a()).norm() /
                                    a.a().norm());
      const auto flipped = PhasePoint::make(pr, pt.x(), -pt.p());
      conj = std::max(conj, (complexify(pr, flipped).a() - a.a().conjugate())
                                    .cwiseAbs().maxCoeff() / r);
    }
    const std::string s = "d=" + std::to_string(d) + " ";
    rec.check(s + "sum a_k^2 = r^2 (relative)", 1e-12, [&] { return sum_sq; });
    rec.check(s + "series N=40 vs closed form", 1e-12, [&] { return series; });
    rec.check(s + "conjugation symmetry", 1e-14, [&] { return conj; });
  }
}

void kernels_suite(Recorder &rec) {
  std::mt19937_64 rng(rec.opt.seed + 1);
  std::uniform_real_distribution<double> re(0.05, kPi - 0.05), im(-1.0, 1.0);
  std::uniform_real_distribution<double> far(1.0, 2.0);
  for (int d = 1; d <= 3; ++d) {
    if (!rec.want(d))
      continue;
    for (double tau : rec.taus({0.1, 0.5, 2.0})) {
      std::vector<cplx> angles, far_angles;
      for (int i = 0; i < 50; ++i)
        angles.push_back(kPi * i / 49.0);
      for (int i = 0; i < 20; ++i)
        angles.emplace_back(re(rng), im(rng));
      for (int i = 0; i < 20; ++i)
        far_angles.emplace_back(re(rng), (i % 2 ? 1.0 : -1.0) * far(rng));
      rec.check(tag(d, tau) + " theta-sum vs spectral, |Im theta| <= 1", 2e-8, [&] {
        double worst = 0;
        for (cplx th : angles)
          worst = std::max(worst,
                           std::abs(rho_sphere_theta(kreq(d, tau, th, KernelMethod::theta_sum)).value -
                                    rho_sphere_spectral(kreq(d, tau, th, KernelMethod::spectral)).value));
        return worst;
      });
      rec.check(tag(d, tau) + " theta-sum vs spectral, 1 < |Im theta| <= 2, relative", 2e-8,
                [&] {
                  double worst = 0;
                  for (cplx th : far_angles) {
                    const cplx a =
                        rho_sphere_theta(kreq(d, tau, th, KernelMethod::theta_sum)).value;
                    const cplx b =
                        rho_sphere_spectral(kreq(d, tau, th, KernelMethod::spectral)).value;
                    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
                  }
                  return worst;
                },
                Bound::at_most, true);
      rec.check(tag(d, tau) + " mass one", 1e-10, [&] {
        const Rule r = gauss_legendre(40, 0.0, kPi, 8);
        double s = 0;
        for (std::size_t i = 0; i < r.size(); ++i)
          s += r.w[i] * rho_sphere(kreq(d, tau, r.x[i], KernelMethod::auto_select)).value.real() *
               std::pow(std::sin(r.x[i]), d - 1);
        return std::abs(unit_sphere_volume(d) * s - 1.0);
      });
    }
  }

  if (rec.want(3)) {
    for (double tau : rec.taus({0.1, 0.5, 2.0}))
      rec.check(tag(3, tau) + " rho^3 from rho^1 (relative)", 1e-12, [&] {
        double worst = 0;
        for (int i = 0; i <= 10; ++i) {
          const auto [rec3, direct] = rho_recursion_check(1, tau, 0.25 * i);
          worst = std::max(worst, std::abs(rec3 - direct) / std::abs(direct));
        }
        return worst;
      });
    rec.check("nu_3 from nu_1 (relative)", 1e-12, [&] {
      double worst = 0;
      for (double s : {0.3, 1.0, 2.5})
        for (double R : {0.0, 1e-6, 0.5, 1.0, 2.0, 4.0, 6.0}) {
          const double c = nu_hyperbolic(3, s, R);
          worst = std::max(worst, std::abs(nu_recursion_d3(s, R) - c) / c);
        }
      return worst;
    });
  }

  const double T = rec.opt.tau.value_or(0.5);
  auto theta_form = [](int d, double tau, cplx th) {
    return rho_sphere_theta(kreq(d, tau, th, KernelMethod::theta_sum)).value;
  };
  if (rec.want(1))
    rec.check(tag(1, T) + " semigroup, complex first argument", 1e-8, [&] {
      const Rule r = periodic_trapezoid(256);
      double worst = 0;
      for (cplx a : {cplx(0.3, 0), cplx(0.3, 0.7)}) {
        cplx s = 0;
        for (std::size_t i = 0; i < r.size(); ++i)
          s += r.w[i] * theta_form(1, 0.4 * T, a - r.x[i]) *
               theta_form(1, 0.6 * T, r.x[i] - 1.9);
        worst = std::max(worst, std::abs(s - theta_form(1, T, a - 1.9)));
      }
      return worst;
    });
  if (rec.want(2))
    rec.check(tag(2, T) + " semigroup, complex first argument", 1e-8, [&] {
      const auto sphere = sphere_rule(2, 48);
      VectorXd z(3);
      z << std::sin(1.0), 0.0, std::cos(1.0);
      double worst = 0;
      for (double q : {0.0, 0.4}) {
        VectorXcd a(3);
        a << kI * std::sinh(q), 0.0, std::cosh(q);
        cplx s = 0;
        for (const auto &n : sphere)
          s += n.w * theta_form(2, 0.4 * T, std::acos(bilinear_dot(a, n.x.cast<cplx>()))) *
               theta_form(2, 0.6 * T, std::acos(std::clamp(n.x.dot(z), -1.0, 1.0)));
        worst = std::max(worst,
                         std::abs(s - theta_form(2, T, std::acos(bilinear_dot(a, z.cast<cplx>())))));
      }
      return worst;
    });
}

void operators_suite(Recorder &rec) {
  for (int d = 1; d <= 2; ++d) {
    if (!rec.want(d))
      continue;
    const double tol = d == 1 ? 1e-13 : 1e-10;
    const int cutoff = d == 1 ? 16 : 10;
    const double r = 1.3, m = 0.7, w = 1.1;
    const double t0 = rec.opt.tau.value_or(0.5);
    const auto pr = ModelParams::make(d, r, m, w, t0 * m * w * r * r);
    OperatorSet base;
    rec.check("d=" + std::to_string(d) + " build basis", 0.0, [&] {
      base = build_basis(BasisSpec{d, cutoff, -1}, pr);
      return 0.0;
    });
    if (base.X.empty())
      continue;
    for (const auto &it : euclidean_algebra_check(base).items)
      rec.check("d=" + std::to_string(d) + " " + it.name, tol, [&] { return it.residual; });
    if (d == 2) {
      rec.check("d=2 L.X = 0", tol, [&] { return lx_residual_d2(base); });
      rec.check("d=2 C = X^2 (L.X)^2", tol, [&] { return lx_casimir_check_d2(base); });
    }
    for (double tau : rec.taus({0.1, 0.5, 1.0})) {
      CheckReport rep;
      rec.check(tag(d, tau) + " build A", 0.0, [&] {
        rep = annihilation_check(build_annihilation(base, tau));
        return 0.0;
      });
      for (const auto &it : rep.items)
        if (it.name != "nonnormality")
          rec.check(tag(d, tau) + " " + it.name, tol, [&] { return it.residual; });
    }
  }
}

void coherent_suite(Recorder &rec) {
  std::mt19937_64 rng(rec.opt.seed + 3);
  for (int d = 1; d <= 2; ++d) {
    if (!rec.want(d))
      continue;
    for (double tau : rec.taus({0.2, 0.5, 1.0}))
      rec.check(tag(d, tau) + " A_k psi_a = a_k psi_a, 20 labels |p| <= 1.5", 1e-7, [&] {
        const double r = 1.3, m = 0.9, w = 1.1;
        const auto pr = ModelParams::make(d, r, m, w, tau * m * w * r * r);
        const int L = certified_cutoff(d, tau, std::cosh(3.0));
        const auto ops =
            build_annihilation(build_position_operators(BasisSpec{d, L, -1}, pr), pr.tau());
        double worst = 0;
        for (int t = 0; t < 20; ++t) {
          const auto s = CoherentState::at(pr, random_point(pr, rng, 1.5));
          for (int k = 0; k <= d; ++k)
            worst = std::max(worst, eigen_residual(s, ops, k));
        }
        return worst;
      });
  }
}

void resolution_suite(Recorder &rec) {
  const double tau = rec.opt.tau.value_or(0.5);
  if (rec.want(1))
    rec.check(tag(1, tau) + " moment int e^{2np} nu_1(2tau,2p) 2 dp = e^{tau n^2}", 1e-10,
              [&] {
                double worst = 0;
                for (int n = 0; n <= 8; ++n) {
                  const std::function<double(double)> f = [&](double p) {
                    return std::exp(2 * n * p) * nu_hyperbolic(1, 2 * tau, 2 * std::abs(p)) * 2;
                  };
                  const double c = std::exp(tau * n * n);
                  const double lo = n * tau - 12 * std::sqrt(tau) - 1;
                  const double hi = n * tau + 12 * std::sqrt(tau) + 1;
                  const double v = integrate_adaptive(f, lo, hi, 1e-14 * c).value;
                  worst = std::max(worst, std::abs(v / c - 1));
                }
                return worst;
              });
  for (int d = 1; d <= 2; ++d) {
    if (!rec.want(d))
      continue;
    const int L = d == 1 ? 8 : 4;
    const double tol = d == 1 ? 1e-8 : 1e-4;
    const std::string what = tag(d, tau) + (d == 1 ? " |n| <= 8" : " l <= 4");
    rec.check(what + " Gram deviation", tol, [&] {
      const auto q = QuadratureSpec::make(d, tau, L);
      return identity_deviation(resolve_identity_matrix(BasisSpec{d, L, -1}, q));
    });
    if (rec.opt.negative_controls)
      rec.check(what + " negative control: weight nu(tau, p)", 10 * tol, [&] {
        const auto q = QuadratureSpec::make(d, tau, L, FiberMeasure::inversion);
        return identity_deviation(resolve_identity_matrix(BasisSpec{d, L, -1}, q));
      }, Bound::greater_than);
  }
}

double round_trip_error(const BandLimitedFunction &f, double tau, FiberMeasure measure) {
  const int d = f.dim;
  const auto q = QuadratureSpec::make(d, tau, f.max_degree(), measure);
  const auto sphere = sphere_rule(d, 5);
  HoloFunction F = [&](const VectorXcd &a) { return f.heat(a, tau); };
  double err = 0.0, norm = 0.0;
  for (const auto &s : sphere) {
    const cplx fx = f(s.x.cast<cplx>());
    err += s.w * std::norm(sb_inverse(F, s.x, q) - fx);
    norm += s.w * std::norm(fx);
  }
  return std::sqrt(err / norm);
}

void transform_suite(Recorder &rec) {
  const double tau = rec.opt.tau.value_or(0.5);
  std::mt19937_64 rng(rec.opt.seed + 5);
  for (int d = 1; d <= 3; ++d) {
    if (!rec.want(d))
      continue;
    const double tol = d == 1 ? 1e-6 : 1e-5;
    const auto f = BandLimitedFunction::random(d, 3, rec.opt.seed * 31 + d);
    rec.check(tag(d, tau) + " invert(transform(f)) relative L2, random l <= 3", tol,
              [&] { return round_trip_error(f, tau, FiberMeasure::inversion); });
    if (rec.opt.negative_controls)
      rec.check(tag(d, tau) + " negative control: resolution weight in the inversion",
                10 * tol, [&] { return round_trip_error(f, tau, FiberMeasure::resolution); },
                Bound::greater_than);
    rec.check(tag(d, tau) + " isometry Gram deviation", d == 1 ? 1e-8 : 1e-4, [&] {
      std::vector<BandLimitedFunction> fs;
      for (int i = 0; i < 4; ++i)
        fs.push_back(BandLimitedFunction::random(d, 3, rec.opt.seed * 57 + 4 * d + i));
      return isometry_deviation(fs, QuadratureSpec::make(d, tau, 3));
    });
  }
  if (rec.want(1))
    rec.check(tag(1, tau) + " round trip through the quadrature transform", 1e-6, [&] {
      const auto f = BandLimitedFunction::random(1, 4, rec.opt.seed * 13);
      const auto q = QuadratureSpec::make(1, tau, 4, FiberMeasure::inversion);
      const auto sphere = sphere_rule(1, 40);
      double worst = 0;
      for (int t = 0; t < 3; ++t) {
        const VectorXd x = random_unit(2, rng);
        const PhaseGrid g = fiber_grid(q, {1, tau, FiberMeasure::inversion}, x);
        const auto cf = sb_transform([&](const VectorXd &y) { return f(y.cast<cplx>()); },
                                     tau, g.a, sphere);
        cplx s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
          s += g.w[i] * cf[i];
        worst = std::max(worst, std::abs(s - f(x.cast<cplx>())));
      }
      return worst;
    });
  if (rec.want(1))
    rec.check(tag(1, tau) + " adjoint inversion vs fiber inversion", 1e-6, [&] {
      const auto f = BandLimitedFunction::random(1, 3, rec.opt.seed * 17);
      const auto qa = QuadratureSpec::make(1, tau, 3, FiberMeasure::resolution,
                                           QuadOptions{24, 0, 24, 4, 1e-16});
      const auto qi = QuadratureSpec::make(1, tau, 3, FiberMeasure::inversion);
      PhaseFunction3 F = [&](const VectorXcd &a, const VectorXd &, const VectorXd &) {
        return f.heat(a, tau);
      };
      HoloFunction H = [&](const VectorXcd &a) { return f.heat(a, tau); };
      double worst = 0;
      for (int t = 0; t < 3; ++t) {
        const VectorXd x = random_unit(2, rng);
        worst = std::max(worst, std::abs(adjoint_inverse(F, x, qa) - sb_inverse(H, x, qi)));
      }
      return worst;
    });
  if (rec.want(2))
    rec.check(tag(2, tau) + " adjoint inversion of C Y_10", 1e-6, [&] {
      const auto f = BandLimitedFunction::harmonic(2, 1, 0);
      const auto q = QuadratureSpec::make(2, tau, 1, FiberMeasure::resolution,
                                          QuadOptions{12, 8, 16, 3, 1e-14});
      std::vector<VectorXd> xs;
      for (int t = 0; t < 3; ++t)
        xs.push_back(random_unit(3, rng));
      PhaseFunction3 F = [&](const VectorXcd &a, const VectorXd &, const VectorXd &) {
        return f.heat(a, tau);
      };
      const auto out = adjoint_inverse(F, xs, q);
      double worst = 0;
      for (std::size_t i = 0; i < xs.size(); ++i)
        worst = std::max(worst, std::abs(out[i] - f(xs[i].cast<cplx>())));
      return worst;
    });
}

void flat_suite(Recorder &rec) {
  for (int d = 1; d <= 2; ++d) {
    if (!rec.want(d))
      continue;
    const double sigma = rec.opt.tau.value_or(0.5);
    const auto fp = FlatParams::make(d, 1.0, 1.0, sigma);
    const HermiteBasis basis{d, fp.sigma(), 6};
    const std::string s = "d=" + std::to_string(d) + " sigma=" + num(sigma) + " ";
    rec.check(s + "resolution on 6 Hermite functions", 1e-8, [&] {
      return identity_deviation(flat_resolution_check(fp, basis));
    });
    if (rec.opt.negative_controls)
      rec.check(s + "negative control: weight nu(sigma, a)", 1e-7, [&] {
        return identity_deviation(flat_resolution_check(
            fp, basis, {}, [&](const VectorXd &im) { return flat_nu(d, fp.sigma(), im); }));
      }, Bound::greater_than);
    rec.check(s + "inversion of the transform on 6 Hermite functions", 1e-8, [&] {
      double worst = 0;
      const auto ix = basis.index();
      for (std::size_t i = 0; i < ix.size(); ++i) {
        auto F = [&](const VectorXcd &a) { return flat_overlaps(basis, a)[i]; };
        for (double x0 : {-1.1, 0.0, 0.6}) {
          VectorXd x = VectorXd::Constant(d, x0);
          if (d == 2)
            x[1] = 0.3 - x0;
          worst = std::max(worst, std::abs(flat_inverse(fp, F, x) - basis.values(x)[i]));
        }
      }
      return worst;
    });
    rec.check(s + "A_k = X_k + i P_k / m omega, series stops at two terms", 1e-13, [&] {
      const auto ops = flat_operators(fp, d == 1 ? 16 : 10);
      const auto in = flat_interior(ops, 2);
      double worst = 0;
      std::vector<MatrixXcd> A;
      for (int k = 0; k < d; ++k) {
        const MatrixXcd closed = ops.X[k] + kI * ops.P[k] / (fp.m() * fp.omega());
        const MatrixXcd diff = flat_annihilation_series(fp, ops, k, 3) - closed;
        A.push_back(closed);
        for (int i : in)
          for (int j : in)
            worst = std::max(worst, std::abs(diff(i, j)));
      }
      if (d == 2) {
        const MatrixXcd c = A[0] * A[1] - A[1] * A[0];
        for (int i : in)
          for (int j : in)
            worst = std::max(worst, std::abs(c(i, j)));
      }
      return worst;
    });
  }
  if (rec.want(2)) {
    SmallTauReport r01, r02;
    rec.check("d=2 tau=0.02 sphere vs flat peak discrepancy", 0.05, [&] {
      r02 = small_tau_limit_check(2, 0.02);
      return r02.peak_discrepancy;
    });
    rec.check("d=2 discrepancy ratio tau=0.01 / tau=0.02 (monotone)", 1.0, [&] {
      r01 = small_tau_limit_check(2, 0.01);
      return r01.peak_discrepancy / r02.peak_discrepancy;
    });
    rec.check("d=2 width / sqrt(tau/2) - 1 at tau=0.01, 0.02", 0.2, [&] {
      return std::max(std::abs(r01.sphere_width / r01.expected_width - 1),
                      std::abs(r02.sphere_width / r02.expected_width - 1));
    });
  }
}

void husimi_suite(Recorder &rec) {
  const double tau = rec.opt.tau.value_or(0.5);
  for (int d = 1; d <= 3; ++d) {
    if (!rec.want(d))
      continue;
    double neg = 0, mass = 0;
    rec.check(tag(d, tau) + " unit mass, 5 random unit states", 1e-6, [&] {
      const auto q = QuadratureSpec::make(d, tau, 3);
      const auto g = phase_grid(q, {d, tau, FiberMeasure::resolution});
      for (int t = 0; t < 5; ++t) {
        const auto f = BandLimitedFunction::random(d, 3, rec.opt.seed * 101 + 7 * d + t);
        mass = std::max(mass, std::abs(husimi_mass(f, g, tau) - 1.0));
        const auto h = husimi_density(f, g, tau);
        neg = std::max(neg, -*std::min_element(h.begin(), h.end()));
      }
      return mass;
    });
    rec.check(tag(d, tau) + " nonnegative (max of -density)", 0.0, [&] { return neg; });
  }
}

} // namespace

SuiteResult run_suite(const std::string &name, const VerifyOptions &opt) {
  static const std::vector<std::pair<std::string, void (*)(Recorder &)>> table = {
      {"complexifier", complexifier_suite}, {"kernels", kernels_suite},
      {"operators", operators_suite},       {"coherent", coherent_suite},
      {"resolution", resolution_suite},     {"transform", transform_suite},
      {"flat", flat_suite},                 {"husimi", husimi_suite}};
  for (const auto &[n, fn] : table) {
    if (n != name)
      continue;
    SuiteResult out;
    out.suite = name;
    Recorder rec{out, opt};
    const auto t0 = std::chrono::steady_clock::now();
    fn(rec);
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }
  throw InvalidArgument("unknown suite '" + name + "'");
}

} // namespace sphcs
