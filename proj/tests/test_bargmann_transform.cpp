#include <doctest.h>

#include <algorithm>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "sphcs/bargmann_transform.hpp"

using namespace sphcs;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXd random_unit(int n, std::mt19937_64 &rng) {
  std::normal_distribution<double> n01;
  VectorXd x(n);
  for (int k = 0; k < n; ++k)
    x[k] = n01(rng);
  return x / x.norm();
}

VectorXcd random_label(int d, double p, std::mt19937_64 &rng) {
  const VectorXd x = random_unit(d + 1, rng);
  const VectorXd u = tangent_frame(x) * random_unit(d, rng);
  return phase_to_complex(x, p * u);
}

double identity_deviation(const MatrixXcd &M) {
  return (M - MatrixXcd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff();
}

BandLimitedFunction random_state(int d, int L, std::mt19937_64 &rng) {
  std::normal_distribution<double> n01;
  if (d == 3) {
    BandLimitedFunction f = BandLimitedFunction::harmonic(3, 0, 0);
    f = f.scaled(cplx(n01(rng), n01(rng)));
    for (int l = 1; l <= L; ++l)
      for (int m = 0; m < 3; ++m)
        f += BandLimitedFunction::harmonic(3, l, m).scaled(cplx(n01(rng), n01(rng)));
    return f;
  }
  BasisSpec b{d, std::max(L, 2), -1};
  VectorXcd c = VectorXcd::Zero(b.size());
  for (int i = 0; i < b.size(); ++i)
    if (b.degree(i) <= L)
      c[i] = cplx(n01(rng), n01(rng));
  return BandLimitedFunction::from_basis(b, c / c.norm());
}

} // namespace

TEST_CASE("sphere rules") {
  for (int d : {1, 2, 3}) {
    const auto rule = sphere_rule(d, 6);
    double vol = 0.0, second = 0.0, odd = 0.0;
    for (const auto &n : rule) {
      CHECK(n.w > 0);
      CHECK(std::abs(n.x.norm() - 1) < 1e-15);
      vol += n.w;
      second += n.w * n.x[0] * n.x[0];
      odd += n.w * n.x[d] * n.x[0] * n.x[0];
    }
    CHECK(std::abs(vol - unit_sphere_volume(d + 1)) < 1e-12);
    CHECK(std::abs(second - unit_sphere_volume(d + 1) / (d + 1)) < 1e-12);
    CHECK(std::abs(odd) < 1e-13);
  }
}

TEST_CASE("tangent frames are orthonormal and orthogonal to x") {
  std::mt19937_64 rng(1);
  for (int d : {1, 2, 3})
    for (int t = 0; t < 5; ++t) {
      const VectorXd x = random_unit(d + 1, rng);
      const MatrixXd F = tangent_frame(x);
      CHECK((F.transpose() * F - MatrixXd::Identity(d, d)).norm() < 1e-14);
      CHECK((F.transpose() * x).norm() < 1e-14);
    }
}

TEST_CASE("phase densities") {
  for (int d : {1, 2, 3}) {
    const PhaseDensity res{d, 0.5, FiberMeasure::resolution};
    CHECK(res.beta(0.0) == std::pow(2.0, d));
    CHECK(res.c_d() == doctest::Approx(unit_sphere_volume(d)));
    for (double p : {0.0, 0.3, 1.0, 2.5})
      CHECK(res.weight(p) > 0);
    // Radial fiber mass of the inversion weight is one.
    const auto q = QuadratureSpec::make(d, 0.5, 0, FiberMeasure::inversion);
    VectorXd x = VectorXd::Zero(d + 1);
    x[0] = 1;
    HoloFunction one = [](const VectorXcd &) { return cplx(1.0); };
    CHECK(std::abs(sb_inverse(one, x, q) - 1.0) < 1e-12);
  }
}

TEST_CASE("quadrature cutoff meets the decay target") {
  for (int d : {1, 2, 3}) {
    for (auto m : {FiberMeasure::resolution, FiberMeasure::inversion}) {
      const auto q = QuadratureSpec::make(d, 0.5, 4, m);
      const PhaseDensity dens{d, 0.5, m};
      const double g = m == FiberMeasure::resolution ? 2.0 : 1.0;
      double peak = 0.0;
      for (int i = 1; i <= 400; ++i) {
        const double p = q.p_max * i / 400.0;
        peak = std::max(peak, dens.weight(p) * std::exp(g * 4 * p) * std::pow(p, d - 1));
      }
      const double edge = dens.weight(q.p_max) * std::exp(g * 4 * q.p_max) *
                          std::pow(q.p_max, d - 1);
      CHECK(edge <= 1e-15 * peak);
      CHECK(std::abs(q.sphere_volume() - unit_sphere_volume(d + 1)) < 1e-12);
    }
  }
}

TEST_CASE("d=1 moment identity") {
  // int e^{2np} nu_1(2 tau, 2p) 2 dp = e^{tau n^2}
  const double tau = 0.5;
  for (int n = 0; n <= 8; ++n) {
    const std::function<double(double)> f = [&](double p) {
      return std::exp(2 * n * p) * nu_hyperbolic(1, 2 * tau, 2 * std::abs(p)) * 2;
    };
    const double lo = n * tau - 12, hi = n * tau + 12;
    const double v = integrate_adaptive(f, lo, hi, 1e-14 * std::exp(tau * n * n)).value;
    CHECK(std::abs(v / std::exp(tau * n * n) - 1) < 1e-10);
  }
}

TEST_CASE("resolution of the identity") {
  SUBCASE("d=1") {
    const auto q = QuadratureSpec::make(1, 0.5, 8);
    CHECK(identity_deviation(resolve_identity_matrix(BasisSpec{1, 8, -1}, q)) <= 1e-8);
  }
  SUBCASE("d=2") {
    const auto q = QuadratureSpec::make(2, 0.5, 4);
    CHECK(identity_deviation(resolve_identity_matrix(BasisSpec{2, 4, -1}, q)) <= 1e-4);
  }
  SUBCASE("small tau") {
    const auto q = QuadratureSpec::make(1, 1e-3, 8);
    CHECK(identity_deviation(resolve_identity_matrix(BasisSpec{1, 8, -1}, q)) <= 1e-6);
  }
  SUBCASE("cutoff beyond the certified degree") {
    const auto q = QuadratureSpec::make(1, 0.5, 4);
    CHECK_THROWS_AS(resolve_identity_matrix(BasisSpec{1, 8, -1}, q), CutoffInsufficient);
  }
}

TEST_CASE("negative control: the inversion weight does not resolve the identity") {
  for (int d : {1, 2}) {
    const int L = d == 1 ? 8 : 4;
    const double tol = d == 1 ? 1e-8 : 1e-4;
    const auto q = QuadratureSpec::make(d, 0.5, L, FiberMeasure::inversion);
    CHECK(identity_deviation(resolve_identity_matrix(BasisSpec{d, L, -1}, q)) > 10 * tol);
  }
}

TEST_CASE("isometry") {
  std::mt19937_64 rng(2);
  for (int d : {1, 2, 3}) {
    std::vector<BandLimitedFunction> fs;
    for (int i = 0; i < 4; ++i)
      fs.push_back(random_state(d, 3, rng));
    const auto q = QuadratureSpec::make(d, 0.5, 3);
    CHECK(isometry_deviation(fs, q) <= (d == 1 ? 1e-6 : 1e-4));
  }
}

TEST_CASE("transform of constants and harmonics") {
  std::mt19937_64 rng(3);
  for (int d : {1, 2, 3}) {
    const auto sphere = sphere_rule(d, 30);
    std::vector<VectorXcd> grid;
    for (int t = 0; t < 4; ++t)
      grid.push_back(random_label(d, 0.4 * t, rng));
    const auto one = sb_transform([](const VectorXd &) { return cplx(1.0); }, 0.5, grid, sphere);
    for (const auto &v : one)
      CHECK(std::abs(v - 1.0) < 1e-12);
    for (int l = 1; l <= 3; ++l) {
      const auto f = BandLimitedFunction::harmonic(d, l, 1);
      const auto cf = sb_transform([&](const VectorXd &x) { return f(x.cast<cplx>()); }, 0.5,
                                   grid, sphere);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx want = std::exp(-0.25 * casimir(d, l)) * f(grid[i]);
        CHECK(std::abs(cf[i] - want) < 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_CASE("d=1 transform of e^{in theta}") {
  const double tau = 0.7;
  const auto sphere = sphere_rule(1, 40);
  for (int n : {-3, 0, 2}) {
    for (double th : {0.3, 2.0}) {
      for (double rho : {-0.8, 0.5}) {
        const cplx w(th, rho);
        VectorXcd a(2);
        a << std::cos(w), std::sin(w);
        const auto cf = sb_transform(
            [&](const VectorXd &x) { return std::exp(kI * (n * std::atan2(x[1], x[0]))); },
            tau, {a}, sphere);
        const cplx want = std::exp(-tau * n * n / 2) * std::exp(kI * (double(n) * w));
        CHECK(std::abs(cf[0] - want) < 1e-12 * std::abs(want));
      }
    }
  }
}

TEST_CASE("inversion round trip") {
  std::mt19937_64 rng(5);
  const double tau = 0.5;
  SUBCASE("d=1 e^{in theta}") {
    const auto q = QuadratureSpec::make(1, tau, 5, FiberMeasure::inversion);
    for (int n : {-5, 1, 4}) {
      HoloFunction F = [&](const VectorXcd &a) {
        return std::exp(-tau * n * n / 2) * std::pow(a[0] + kI * a[1], n);
      };
      const VectorXd x = random_unit(2, rng);
      const cplx want = std::pow(cplx(x[0], x[1]), n);
      CHECK(std::abs(sb_inverse(F, x, q) - want) < 1e-10);
    }
  }
  for (int d : {1, 2, 3}) {
    const auto f = random_state(d, 3, rng);
    const auto q = QuadratureSpec::make(d, tau, f.max_degree(), FiberMeasure::inversion);
    const auto sphere = sphere_rule(d, 5);
    HoloFunction F = [&](const VectorXcd &a) { return f.heat(a, tau); };
    double err = 0.0, norm = 0.0;
    for (const auto &s : sphere) {
      const cplx fx = f(s.x.cast<cplx>());
      err += s.w * std::norm(sb_inverse(F, s.x, q) - fx);
      norm += s.w * std::norm(fx);
    }
    INFO(d);
    CHECK(std::sqrt(err / norm) <= (d == 1 ? 1e-6 : 1e-5));

    // The resolution weight in the inversion formula fails.
    const auto wrong = QuadratureSpec::make(d, tau, f.max_degree(), FiberMeasure::resolution);
    double werr = 0.0;
    for (const auto &s : sphere)
      werr += s.w * std::norm(sb_inverse(F, s.x, wrong) - f(s.x.cast<cplx>()));
    CHECK(std::sqrt(werr / norm) > 1e-4);
  }
}

TEST_CASE("d=2 round trip through the quadrature transform") {
  const double tau = 0.5;
  const auto f = BandLimitedFunction::harmonic(2, 2, 1);
  const auto q = QuadratureSpec::make(2, tau, 2, FiberMeasure::inversion,
                                      QuadOptions{0, 6, 16, 3, 1e-14});
  const auto sphere = sphere_rule(2, 24);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 3; ++t) {
    const VectorXd x = random_unit(3, rng);
    const PhaseGrid g = fiber_grid(q, {2, tau, FiberMeasure::inversion}, x);
    const auto cf = sb_transform([&](const VectorXd &y) { return f(y.cast<cplx>()); }, tau,
                                 g.a, sphere);
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      s += g.w[i] * cf[i];
    CHECK(std::abs(s - f(x.cast<cplx>())) < 1e-6);
  }
}

TEST_CASE("reproducing identity") {
  std::mt19937_64 rng(7);
  const double tau = 0.5;
  const auto q = QuadratureSpec::make(1, tau, 1, FiberMeasure::resolution,
                                      QuadOptions{24, 0, 24, 4, 1e-16});
  HoloFunction one = [](const VectorXcd &) { return cplx(1.0); };
  const auto e1 = BandLimitedFunction::harmonic(1, 1, 1);
  const auto em = BandLimitedFunction::harmonic(1, 1, -1);
  HoloFunction F1 = [&](const VectorXcd &a) { return e1.heat(a, tau); };
  HoloFunction Fm = [&](const VectorXcd &a) { return em.heat(a, tau); };
  for (int t = 0; t < 3; ++t) {
    const VectorXcd a = random_label(1, 0.6, rng);
    CHECK(std::abs(reproducing_identity_check(one, a, q) - 1.0) < 1e-8);
    const cplx v1 = reproducing_identity_check(F1, a, q);
    CHECK(std::abs(v1 - F1(a)) < 1e-8 * std::abs(F1(a)));
    const cplx c1(0.3, -1.2), c2(2.0, 0.5), c3(-0.7, 0.1);
    HoloFunction mix = [&](const VectorXcd &b) { return c1 + c2 * F1(b) + c3 * Fm(b); };
    const cplx lhs = reproducing_identity_check(mix, a, q);
    const cplx rhs = c1 * reproducing_identity_check(one, a, q) + c2 * v1 +
                     c3 * reproducing_identity_check(Fm, a, q);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("adjoint inversion") {
  std::mt19937_64 rng(8);
  const double tau = 0.5;
  SUBCASE("d=2 Y_10") {
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
    for (std::size_t i = 0; i < xs.size(); ++i)
      CHECK(std::abs(out[i] - f(xs[i].cast<cplx>())) < 1e-6);
  }
  SUBCASE("d=1 non-holomorphic part is projected out") {
    const auto q = QuadratureSpec::make(1, tau, 2, FiberMeasure::resolution,
                                        QuadOptions{24, 0, 24, 4, 1e-16});
    const auto f = BandLimitedFunction::harmonic(1, 2, 1);
    const double eps = 0.3;
    PhaseFunction3 F = [&](const VectorXcd &a, const VectorXd &, const VectorXd &) {
      return f.heat(a, tau) + eps * std::conj(a[0]);
    };
    for (int t = 0; t < 3; ++t) {
      const VectorXd x = random_unit(2, rng);
      // conj(a_1) = cos(conj w) projects to e^{-tau/2} cos(theta).
      const cplx want = f(x.cast<cplx>()) + eps * std::exp(-tau / 2) * x[0];
      CHECK(std::abs(adjoint_inverse(F, x, q) - want) < 1e-8);
    }
    PhaseFunction3 zero = [](const VectorXcd &, const VectorXd &, const VectorXd &) {
      return cplx(0.0);
    };
    CHECK(adjoint_inverse(zero, random_unit(2, rng), q) == 0.0);
  }
  SUBCASE("agrees with the fiber inversion on holomorphic input") {
    const auto f = BandLimitedFunction::harmonic(1, 3, -1);
    const auto qa = QuadratureSpec::make(1, tau, 3, FiberMeasure::resolution,
                                         QuadOptions{24, 0, 24, 4, 1e-16});
    const auto qi = QuadratureSpec::make(1, tau, 3, FiberMeasure::inversion);
    PhaseFunction3 F = [&](const VectorXcd &a, const VectorXd &, const VectorXd &) {
      return f.heat(a, tau);
    };
    HoloFunction H = [&](const VectorXcd &a) { return f.heat(a, tau); };
    const VectorXd x = random_unit(2, rng);
    CHECK(std::abs(adjoint_inverse(F, x, qa) - sb_inverse(H, x, qi)) < 1e-6);
  }
}

TEST_CASE("Husimi density") {
  std::mt19937_64 rng(9);
  for (int d : {1, 2, 3}) {
    const auto q = QuadratureSpec::make(d, 0.5, 3);
    const auto g = phase_grid(q, {d, 0.5, FiberMeasure::resolution});
    for (int t = 0; t < 5; ++t) {
      auto f = random_state(d, 3, rng);
      f = f.scaled(1.0 / sphere_norm(f, q.sphere));
      CHECK(std::abs(husimi_mass(f, g, 0.5) - 1.0) < 1e-6);
      const auto h = husimi_density(f, g, 0.5);
      CHECK(*std::min_element(h.begin(), h.end()) >= 0.0);
    }
  }
  SUBCASE("constant state carries only the fiber weight") {
    const int d = 2;
    const auto q = QuadratureSpec::make(d, 0.5, 0);
    auto f = BandLimitedFunction::harmonic(d, 0, 0);
    const auto g = phase_grid(q, {d, 0.5, FiberMeasure::resolution});
    const auto h = husimi_density(f, g, 0.5);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(h[i] / g.density[i] * 4 * kPi - 1));
    CHECK(worst < 1e-14);
    CHECK(std::abs(husimi_mass(f, q) - 1.0) < 1e-10);
  }
  SUBCASE("d=1 plane wave: theta independent, peaked at p = n tau") {
    const double tau = 0.5;
    const int n = 4;
    const auto f = BandLimitedFunction::harmonic(1, n, 1);
    const auto q = QuadratureSpec::make(1, tau, n, FiberMeasure::resolution,
                                        QuadOptions{0, 0, 200, 4, 1e-16});
    const auto g = phase_grid(q, {1, tau, FiberMeasure::resolution});
    const auto h = husimi_density(f, g, tau);
    const std::size_t per = q.directions.size() * q.radial.size();
    double best = -1, at = 0, spread = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (h[i] > best) {
        best = h[i];
        at = g.p[i].dot(tangent_frame(g.x[i]).col(0));
      }
    for (std::size_t i = 0; i < g.size(); ++i)
      spread = std::max(spread, std::abs(h[i] - h[i % per]));
    CHECK(spread <= 1e-12 * best);
    CHECK(std::abs(std::abs(at) - n * tau) < 0.05);
  }
}

TEST_CASE("invariant measure, radial Laplacian and the sum identity") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n01;
  for (int d : {1, 2, 3}) {
    const auto q = QuadratureSpec::make(d, 0.5, 4);
    std::vector<MatrixXd> rots;
    for (int t = 0; t < 3; ++t) {
      MatrixXd G = MatrixXd::Zero(d + 1, d + 1);
      for (int k = 0; k <= d; ++k)
        for (int l = k + 1; l <= d; ++l) {
          G(k, l) = n01(rng);
          G(l, k) = -G(k, l);
        }
      rots.push_back(G.exp());
    }
    std::vector<VectorXcd> samples;
    for (int t = 0; t < 5; ++t)
      samples.push_back(random_label(d, 0.5 * t, rng));
    auto phi = [](double R) { return std::exp(-R * R); };
    auto dphi = [](double R) { return -2 * R * std::exp(-R * R); };
    auto ddphi = [](double R) { return (4 * R * R - 2) * std::exp(-R * R); };
    const auto rep = invariance_measure_check(q, rots, phi, dphi, ddphi,
                                              {0.3, 0.7, 1.2, 1.8, 2.5}, samples);
    INFO(d);
    CHECK(rep.rotation < 1e-12);
    CHECK(rep.radial_laplacian < 1e-5);
    CHECK(rep.sum_identity < 1e-13);
  }
}
