#include <doctest.h>

#include <random>

#include "sphcs/heat_kernels.hpp"

using namespace sphcs;

namespace {

KernelEvalRequest req(int d, double tau, cplx th, KernelMethod m) {
  KernelEvalRequest q;
  q.dim = d;
  q.time = tau;
  q.argument = th;
  q.method = m;
  return q;
}

cplx theta_form(int d, double tau, cplx th) {
  return rho_sphere_theta(req(d, tau, th, KernelMethod::theta_sum)).value;
}
cplx spectral_form(int d, double tau, cplx th) {
  return rho_sphere_spectral(req(d, tau, th, KernelMethod::spectral)).value;
}

struct Oracle {
  int d;
  double tau;
  cplx theta;
  cplx value;
};

// 40-digit zonal sums (400 or more terms), truncated to 17 digits.
const Oracle kOracles[] = {
    {1, 0.5, {0, 0}, {0.56418958354775629502, 0}},
    {1, 0.5, {0.5, 0.8}, {0.58056373549541195803, -0.59777080689126791546}},
    {2, 0.5, {kPi / 3, 0}, {0.12740374130184030518, 0}},
    {2, 0.5, {0.5, 0.8}, {0.36687171814820275066, -0.33094011583883631044}},
    {2, 0.1, {2.0, -0.7}, {2.213596821416085892e-8, 4.6778379860901095758e-8}},
    {2, 2.0, {0, 0}, {0.11287607871522171856, 0}},
    {2, 0.3, {kPi, 0}, {5.6859916323798307053e-7, 0}},
    {3, 0.5, {1, 0}, {0.10081268555372851274, 0}},
    {3, 0.5, {0.5, 0.8}, {0.24950523923214598172, -0.19774055835556050935}},
    {3, 0.5, {0, 0}, {0.23059442931851905501, 0}},
    {3, 2.0, {kPi, 0}, {0.040724327137041731359, 0}},
};

} // namespace

TEST_CASE("zonal polynomials") {
  CHECK(gegenbauer_eval(2, 0, {0.3, 0.2}) == cplx(1.0));
  CHECK(std::abs(gegenbauer_eval(2, 1, {0.3, 0.2}) - cplx(0.3, 0.2)) < 1e-16);
  CHECK(std::abs(gegenbauer_eval(2, 2, 0.5) + 0.125) < 1e-16);
  // U_3(z) = 8z^3 - 4z, T_3(z) = 4z^3 - 3z at a point outside [-1, 1].
  const cplx z(1.7, -0.9);
  CHECK(std::abs(gegenbauer_eval(3, 3, z) - (8.0 * z * z * z - 4.0 * z)) < 1e-13);
  CHECK(std::abs(gegenbauer_eval(1, 3, z) - (4.0 * z * z * z - 3.0 * z)) < 1e-13);
  // P_5 from its closed form.
  const cplx p5 = (63.0 * std::pow(z, 5) - 70.0 * std::pow(z, 3) + 15.0 * z) / 8.0;
  CHECK(std::abs(gegenbauer_eval(2, 5, z) - p5) < 1e-12 * std::abs(p5));
}

TEST_CASE("sphere volumes and weights") {
  CHECK(unit_sphere_volume(2) == doctest::Approx(2 * kPi));
  CHECK(unit_sphere_volume(3) == doctest::Approx(4 * kPi));
  CHECK(unit_sphere_volume(4) == doctest::Approx(2 * kPi * kPi));
  CHECK(zonal_weight(2, 3) == doctest::Approx(7.0 / (4 * kPi)));
  CHECK(zonal_weight(3, 2) == doctest::Approx(3.0 / (2 * kPi * kPi)));
}

TEST_CASE("kernel values against high-precision zonal sums") {
  for (const auto &o : kOracles) {
    CAPTURE(o.d);
    CAPTURE(o.tau);
    CAPTURE(o.theta);
    const double tol = 1e-12 * std::max(1.0, std::abs(o.value));
    CHECK(std::abs(theta_form(o.d, o.tau, o.theta) - o.value) <= tol);
    CHECK(std::abs(spectral_form(o.d, o.tau, o.theta) - o.value) <= tol);
  }
}

TEST_CASE("dual-method agreement on real and complex grids") {
  for (int d = 1; d <= 3; ++d)
    for (double tau : {0.1, 0.5, 2.0})
      for (int i = 0; i < 13; ++i)
        for (double y : {0.0, 0.5, -1.0}) {
          const cplx th(-0.3 + 0.55 * i, y);
          const auto a = rho_sphere_theta(req(d, tau, th, KernelMethod::theta_sum));
          const auto b = rho_sphere_spectral(req(d, tau, th, KernelMethod::spectral));
          CAPTURE(d);
          CAPTURE(tau);
          CAPTURE(th);
          CHECK(std::abs(a.value - b.value) <= 2e-12 * std::max(1.0, std::abs(a.value)));
          CHECK(a.error_bound <= 1e-12);
          CHECK(b.error_bound <= 1e-12);
        }
}

TEST_CASE("evenness and periodicity") {
  for (int d = 1; d <= 3; ++d) {
    const cplx th(0.7, 0.4);
    const cplx v = theta_form(d, 0.3, th);
    CHECK(std::abs(theta_form(d, 0.3, -th) - v) < 1e-13);
    CHECK(std::abs(theta_form(d, 0.3, th + 2 * kPi) - v) < 1e-13);
    CHECK(std::abs(theta_form(d, 0.3, th - 4 * kPi) - v) < 1e-13);
  }
}

TEST_CASE("removable singularities at theta = 0 and pi are continuous") {
  for (int d : {2, 3}) {
    for (double th0 : {0.0, kPi}) {
      const cplx at = theta_form(d, 0.4, th0);
      for (double e : {1e-3, 1e-5, 1e-7}) {
        // second-order contact with curvature of order 1/tau^2
        const double tol = 100.0 * e * e * std::abs(at) + 1e-13;
        CHECK(std::abs(theta_form(d, 0.4, th0 + e) - at) < tol);
        CHECK(std::abs(theta_form(d, 0.4, cplx(th0, e)) - at) < tol);
      }
    }
  }
}

TEST_CASE("d=3 at theta=0: limit of the image sum") {
  const double tau = 0.5;
  const double expected = std::pow(2 * kPi * tau, -1.5) * std::exp(tau / 2);
  // images contribute below 1e-17
  CHECK(std::abs(theta_form(3, tau, 0.0) - expected) < 1e-14);
}

TEST_CASE("large tau tends to the uniform density") {
  for (int d = 1; d <= 3; ++d)
    CHECK(std::abs(spectral_form(d, 60.0, 1.1) - 1.0 / unit_sphere_volume(d + 1)) < 1e-12);
}

TEST_CASE("recursion rho^1 -> rho^3") {
  auto rel = [](std::pair<cplx, cplx> p) {
    return std::abs(p.first - p.second) / std::abs(p.second);
  };
  CHECK(rel(rho_recursion_check(1, 0.5, 1.0)) <= 1e-12);
  CHECK(rel(rho_recursion_check(1, 0.5, {0.5, 0.8})) <= 1e-10);
  const auto at0 = rho_recursion_check(1, 0.5, 0.0);
  CHECK(std::isfinite(at0.first.real()));
  CHECK(rel(at0) <= 1e-12);
  CHECK(rel(rho_recursion_check(1, 0.2, kPi - 1e-6)) <= 1e-9);
  CHECK_THROWS_AS(rho_recursion_check(2, 0.5, 1.0), UnsupportedDimension);
}

TEST_CASE("positivity on real angles") {
  for (int d = 1; d <= 3; ++d)
    for (double tau : {0.05, 0.3, 1.5})
      for (int i = 0; i <= 20; ++i) {
        const cplx v = rho_sphere(req(d, tau, kPi * i / 20.0, KernelMethod::auto_select)).value;
        CAPTURE(d);
        CAPTURE(tau);
        CAPTURE(i);
        CHECK(v.real() > 0);
        CHECK(std::abs(v.imag()) < 1e-14);
      }
}

TEST_CASE("mass one under surface measure") {
  // int_{S^d} rho(x.y) dy = vol(S^{d-1}) int_0^pi rho(t) sin^{d-1} t dt
  const Rule r = gauss_legendre(40, 0.0, kPi, 8);
  for (int d = 1; d <= 3; ++d)
    for (double tau : {0.1, 0.5, 2.0}) {
      double s = 0;
      for (std::size_t i = 0; i < r.size(); ++i)
        s += r.w[i] * theta_form(d, tau, r.x[i]).real() * std::pow(std::sin(r.x[i]), d - 1);
      CHECK(std::abs(unit_sphere_volume(d) * s - 1.0) < 1e-10);
    }
}

TEST_CASE("semigroup on S^1 and S^2 including a complex first argument") {
  // S^1: int rho_t(a - phi) rho_s(phi - z) dphi
  {
    const Rule r = periodic_trapezoid(256);
    for (cplx a : {cplx(0.3, 0), cplx(0.3, 0.7)}) {
      cplx s = 0;
      for (std::size_t i = 0; i < r.size(); ++i)
        s += r.w[i] * theta_form(1, 0.2, a - r.x[i]) * theta_form(1, 0.3, r.x[i] - 1.9);
      CHECK(std::abs(s - theta_form(1, 0.5, a - 1.9)) < 1e-8);
    }
  }
  // S^2: x = north pole continued to a = (i sinh q, 0, cosh q), z fixed.
  {
    const Rule gc = gauss_legendre(48, -1.0, 1.0, 2);
    const Rule ph = periodic_trapezoid(96);
    const double zv[3] = {std::sin(1.0), 0.0, std::cos(1.0)};
    for (double q : {0.0, 0.4}) {
      const cplx av[3] = {kI * std::sinh(q), 0.0, std::cosh(q)};
      cplx s = 0;
      for (std::size_t i = 0; i < gc.size(); ++i)
        for (std::size_t j = 0; j < ph.size(); ++j) {
          const double st = std::sqrt(1 - gc.x[i] * gc.x[i]);
          const double y[3] = {st * std::cos(ph.x[j]), st * std::sin(ph.x[j]), gc.x[i]};
          const cplx ay = av[0] * y[0] + av[1] * y[1] + av[2] * y[2];
          const double yz = y[0] * zv[0] + y[1] * zv[1] + y[2] * zv[2];
          s += gc.w[i] * ph.w[j] * theta_form(2, 0.3, std::acos(ay)) *
               theta_form(2, 0.4, std::acos(std::clamp(yz, -1.0, 1.0)));
        }
      const cplx az = av[0] * zv[0] + av[2] * zv[2];
      CHECK(std::abs(s - theta_form(2, 0.7, std::acos(az))) < 1e-8);
    }
  }
}

TEST_CASE("heat equation residual") {
  // d rho / d tau = (1/2)(rho'' + (d-1) cot(theta) rho')
  for (int d = 1; d <= 3; ++d)
    for (double tau : {0.3, 1.0})
      for (cplx th : {cplx(0.8, 0), cplx(1.9, 0), cplx(0.6, 0.5)}) {
        const double h = 1e-3;
        auto f = [&](double t, cplx x) { return theta_form(d, t, x); };
        const cplx dt = (f(tau - 2 * h, th) - 8.0 * f(tau - h, th) +
                         8.0 * f(tau + h, th) - f(tau + 2 * h, th)) / (12 * h);
        const cplx d1 = (f(tau, th - 2 * h) - 8.0 * f(tau, th - h) +
                         8.0 * f(tau, th + h) - f(tau, th + 2 * h)) / (12 * h);
        const cplx d2 = (-f(tau, th - 2 * h) + 16.0 * f(tau, th - h) - 30.0 * f(tau, th) +
                         16.0 * f(tau, th + h) - f(tau, th + 2 * h)) / (12 * h * h);
        const cplx lap = d2 + double(d - 1) * std::cos(th) / std::sin(th) * d1;
        CHECK(std::abs(dt - 0.5 * lap) <= 1e-5 * std::abs(dt) + 1e-8);
      }
}

TEST_CASE("spectral method refuses small tau") {
  CHECK_THROWS_AS(spectral_form(2, 0.01, 0.3), NonConvergence);
  auto q = req(2, 0.5, 0.3, KernelMethod::theta_sum);
  q.dim = 4;
  CHECK_THROWS_AS(rho_sphere(q), UnsupportedDimension);
  q.dim = 2;
  q.truncation.target_abs_error = 1e-3;
  CHECK_THROWS_AS(rho_sphere(q), InvalidArgument);
}

TEST_CASE("hyperbolic kernels") {
  CHECK(std::abs(nu_hyperbolic(1, 1.0, 0.0) - 0.3989422804014327) < 1e-15);
  CHECK(std::abs(nu_hyperbolic(3, 0.7, 0.0) -
                 std::pow(2 * kPi * 0.7, -1.5) * std::exp(-0.35)) < 1e-15);
  CHECK(std::abs(nu_hyperbolic(2, 0.5, 1.0) - 0.099563124996703483198) < 1e-13);
  CHECK(std::abs(nu_hyperbolic(2, 1.0, 0.0) - 0.13505600024041982128) < 1e-13);
  CHECK(std::abs(nu_hyperbolic(2, 2.0, 3.0) - 0.0033909609992764919148) < 1e-13);
  for (double s : {0.3, 1.0, 2.5})
    for (double R : {0.0, 1e-6, 0.5, 2.0, 6.0}) {
      const double c = nu_hyperbolic(3, s, R);
      CHECK(std::abs(nu_recursion_d3(s, R) - c) <= 1e-12 * c);
      for (int d = 1; d <= 3; ++d)
        CHECK(nu_hyperbolic(d, s, R) > 0);
    }
  CHECK_THROWS_AS(nu_hyperbolic(4, 1.0, 0.0), UnsupportedDimension);
  CHECK_THROWS_AS(nu_hyperbolic(2, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("hyperbolic normalization") {
  CHECK(std::abs(nu_normalization_check(1, 0.7) - 1.0) < 1e-12);
  CHECK(std::abs(nu_normalization_check(3, 1.0) - 1.0) < 1e-10);
  CHECK(std::abs(nu_normalization_check(2, 0.5) - 1.0) < 1e-8);
  CHECK(std::abs(nu_normalization_check(2, 2.0) - 1.0) < 1e-8);
}

TEST_CASE("hyperbolic heat equation residual") {
  // d nu / ds = (1/2)(nu'' + (d-1) coth(R) nu')
  for (int d = 1; d <= 3; ++d)
    for (double s : {0.5, 1.5})
      for (double R : {0.7, 2.0}) {
        const double h = 1e-3;
        auto f = [&](double t, double x) { return nu_hyperbolic(d, t, x, 1e-15); };
        const double dt = (f(s - 2 * h, R) - 8 * f(s - h, R) + 8 * f(s + h, R) - f(s + 2 * h, R)) / (12 * h);
        const double d1 = (f(s, R - 2 * h) - 8 * f(s, R - h) + 8 * f(s, R + h) - f(s, R + 2 * h)) / (12 * h);
        const double d2 = (-f(s, R - 2 * h) + 16 * f(s, R - h) - 30 * f(s, R) + 16 * f(s, R + h) - f(s, R + 2 * h)) / (12 * h * h);
        const double rhs = 0.5 * (d2 + (d - 1) / std::tanh(R) * d1);
        CHECK(std::abs(dt - rhs) <= 1e-5 * std::abs(dt) + 1e-9);
      }
}
