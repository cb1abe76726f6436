#include <doctest.h>

#include <random>

#include "sphcs/coherent_states.hpp"

using namespace sphcs;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

PhasePoint random_point(const ModelParams &pr, std::mt19937_64 &rng, double pmax) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  const int n = pr.d() + 1;
  VectorXd x(n), v(n);
  for (int k = 0; k < n; ++k) {
    x[k] = n01(rng);
    v[k] = n01(rng);
  }
  x *= pr.r() / x.norm();
  v -= x * (x.dot(v) / x.squaredNorm());
  v *= pmax * u01(rng) * pr.momentum_unit() / v.norm();
  return PhasePoint::make(pr, x, v);
}

CoherentState circle_state(double th0, double rho, double tau) {
  VectorXcd a(2);
  const cplx w(th0, rho);
  a << std::cos(w), std::sin(w);
  return CoherentState::at(ComplexSpherePoint::make(1.0, a), tau);
}

// Periodised Gaussian summed directly.
cplx periodic_gaussian(cplx w, double tau) {
  cplx s = 0.0;
  for (int n = -30; n <= 30; ++n) {
    const cplx u = w - 2.0 * kPi * n;
    s += std::exp(-u * u / (2 * tau));
  }
  return s / std::sqrt(2 * kPi * tau);
}

} // namespace

TEST_CASE("d=1 wavefunction is a shifted periodic Gaussian") {
  const auto s = circle_state(0.7, 0.6, 0.4);
  for (double th : {0.0, 0.5, 1.9, 3.0, -2.2}) {
    VectorXd x(2);
    x << std::cos(th), std::sin(th);
    const cplx want = periodic_gaussian(cplx(th - 0.7, -0.6), 0.4);
    CHECK(std::abs(position_wavefunction(s, x) - want) < 1e-12 * std::abs(want) + 1e-14);
  }
}

TEST_CASE("real labels: peak value, positivity and mass one") {
  const auto s = circle_state(0.3, 0.0, 0.5);
  VectorXd x(2);
  x << std::cos(0.3), std::sin(0.3);
  CHECK(std::abs(position_wavefunction(s, x) - periodic_gaussian(0.0, 0.5)) < 1e-13);
  const Rule t = periodic_trapezoid(64);
  cplx mass = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    x << std::cos(t.x[i]), std::sin(t.x[i]);
    const cplx v = position_wavefunction(s, x);
    CHECK(v.real() > 0);
    mass += t.w[i] * v;
  }
  CHECK(std::abs(mass - 1.0) < 1e-12);
}

TEST_CASE("d=1 coefficient magnitudes") {
  const double tau = 1.0, rho = 0.5;
  const auto s = circle_state(0.0, rho, tau);
  const BasisSpec b{1, 12, -1};
  const auto c = coefficients_in_basis(s, b);
  int argmax = 0;
  for (int n = -12; n <= 12; ++n) {
    const double want = std::exp(-n * n / 2.0 + n * rho) / std::sqrt(2 * kPi);
    CHECK(std::abs(std::abs(c.c[n + 12]) - want) < 1e-15);
    if (std::abs(c.c[n + 12]) > std::abs(c.c[argmax + 12]))
      argmax = n;
  }
  CHECK(argmax == 0); // rho / tau = 0.5 rounds to the nearest integer
  CHECK_FALSE(c.tail_warning);
  CHECK(coefficients_in_basis(s, BasisSpec{1, 2, -1}).tail_warning);
}

TEST_CASE("coefficient sums reproduce the wavefunction") {
  std::mt19937_64 rng(21);
  for (int d : {1, 2}) {
    const auto pr = ModelParams::make(d, 1.5, 1.0, 1.0, 0.75); // tau = 1/3
    const BasisSpec b{d, 30, -1};
    for (int t = 0; t < 5; ++t) {
      const auto s = CoherentState::at(pr, random_point(pr, rng, 1.2));
      const auto c = coefficients_in_basis(s, b);
      const auto y = random_point(pr, rng, 0.0);
      const cplx sum = c.c.transpose() * basis_values(b, y.x() / pr.r());
      const cplx direct = position_wavefunction(s, y.x());
      CHECK(std::abs(sum - direct) < 1e-10 * std::sqrt(norm_squared(s)));
    }
  }
}

TEST_CASE("reproducing kernel") {
  std::mt19937_64 rng(4);
  for (int d : {1, 2, 3}) {
    const auto pr = ModelParams::dimensionless(d, 0.4);
    for (int t = 0; t < 10; ++t) {
      const auto a = complexify(pr, random_point(pr, rng, 1.0));
      const auto b = complexify(pr, random_point(pr, rng, 1.0));
      const cplx ab = reproducing_kernel(a, b, 0.4), ba = reproducing_kernel(b, a, 0.4);
      CHECK(std::abs(ab - std::conj(ba)) < 1e-12 * std::abs(ab));
      const cplx aa = reproducing_kernel(a, a, 0.4);
      CHECK(aa.real() > 0);
      CHECK(std::abs(aa.imag()) < 1e-12 * aa.real());
    }
    // a = b real gives the peak of rho_{2 tau}.
    const auto x = complexify(pr, random_point(pr, rng, 0.0));
    KernelEvalRequest req;
    req.dim = d;
    req.time = 0.8;
    CHECK(std::abs(reproducing_kernel(x, x, 0.4) - rho_sphere(req).value) < 1e-14);
  }
}

TEST_CASE("d=1 reproducing kernel equals the basis inner product") {
  std::mt19937_64 rng(9);
  const auto pr = ModelParams::dimensionless(1, 0.5);
  const BasisSpec b{1, 40, -1};
  for (int t = 0; t < 10; ++t) {
    const auto s1 = CoherentState::at(pr, random_point(pr, rng, 1.5));
    const auto s2 = CoherentState::at(pr, random_point(pr, rng, 1.5));
    const cplx k = reproducing_kernel(s1.label, s2.label, 0.5);
    CHECK(std::abs(overlap(s1, s2, b) - k) < 1e-10 * std::abs(k));
    CHECK(std::abs(overlap(s1, s1, b) - norm_squared(s1)) < 1e-10 * norm_squared(s1));
    CHECK(std::abs(overlap(s1, s2, b) - std::conj(overlap(s2, s1, b))) < 1e-14 * std::abs(k));
  }
}

TEST_CASE("d=2 overlap of orthogonal real labels") {
  const auto pr = ModelParams::dimensionless(2, 0.5);
  VectorXd x(3), y(3), z(3);
  x << 1, 0, 0;
  y << 0, 1, 0;
  z.setZero();
  const auto s1 = CoherentState::at(pr, PhasePoint::make(pr, x, z));
  const auto s2 = CoherentState::at(pr, PhasePoint::make(pr, y, z));
  KernelEvalRequest req;
  req.dim = 2;
  req.time = 1.0;
  req.argument = kPi / 2;
  req.method = KernelMethod::theta_sum;
  const cplx th = rho_sphere(req).value;
  req.method = KernelMethod::spectral;
  const cplx sp = rho_sphere(req).value;
  CHECK(std::abs(th - sp) < 1e-13);
  CHECK(std::abs(overlap(s1, s2, BasisSpec{2, 30, -1}) - th) < 1e-12);
}

TEST_CASE("normalized accessors") {
  const auto s = circle_state(1.0, 0.8, 0.3);
  const auto c = normalized_coefficients(s, BasisSpec{1, 40, -1});
  CHECK(std::abs(c.c.norm() - 1.0) < 1e-12);
  VectorXd x(2);
  x << 1, 0;
  CHECK(std::abs(normalized_wavefunction(s, x) * std::sqrt(norm_squared(s)) -
                 position_wavefunction(s, x)) < 1e-14);
}

TEST_CASE("coherent states are eigenvectors of the annihilation operators") {
  std::mt19937_64 rng(13);
  for (int d : {1, 2}) {
    for (double tau : {0.2, 0.5, 1.0}) {
      const auto pr = ModelParams::make(d, 1.3, 0.9, 1.1, tau * 0.9 * 1.1 * 1.3 * 1.3);
      const int L = certified_cutoff(d, tau, std::cosh(3.0));
      const auto ops = build_annihilation(
          build_position_operators(BasisSpec{d, L, -1}, pr), pr.tau());
      for (int t = 0; t < 4; ++t) {
        const auto s = CoherentState::at(pr, random_point(pr, rng, 1.5));
        for (int k = 0; k <= d; ++k) {
          INFO(d, " ", tau, " ", k);
          CHECK(eigen_residual(s, ops, k) <= 1e-7);
        }
      }
    }
  }
}

TEST_CASE("coefficients are holomorphic in the label") {
  std::mt19937_64 rng(17);
  for (int d : {1, 2}) {
    const auto pr = ModelParams::dimensionless(d, 0.5);
    for (int t = 0; t < 3; ++t) {
      const auto s = CoherentState::at(pr, random_point(pr, rng, 1.0));
      CHECK(holomorphy_residual(s, BasisSpec{d, 20, -1}) <= 1e-6);
    }
  }
}

TEST_CASE("rotation covariance") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n01;
  for (int d : {1, 2}) {
    const auto pr = ModelParams::dimensionless(d, 0.5);
    for (int t = 0; t < 3; ++t) {
      MatrixXd G = MatrixXd::Zero(d + 1, d + 1);
      for (int k = 0; k <= d; ++k)
        for (int l = k + 1; l <= d; ++l) {
          G(k, l) = n01(rng);
          G(l, k) = -G(k, l);
        }
      const auto s = CoherentState::at(pr, random_point(pr, rng, 1.0));
      CHECK(rotation_covariance_residual(s, BasisSpec{d, 20, -1}, G) <= 1e-12);
    }
  }
  // d=1: rotation by phi multiplies c_n by exp(-i n phi).
  const auto s = circle_state(0.2, 0.4, 0.5);
  const auto r = circle_state(0.2 + 0.9, 0.4, 0.5);
  const BasisSpec b{1, 10, -1};
  const auto c = coefficients_in_basis(s, b).c, cr = coefficients_in_basis(r, b).c;
  for (int n = -10; n <= 10; ++n)
    CHECK(std::abs(cr[n + 10] - std::exp(-kI * (n * 0.9)) * c[n + 10]) < 1e-15);
}

TEST_CASE("real-label states peak at the label with width sqrt(tau/2)") {
  for (int d : {1, 2, 3}) {
    for (double tau : {0.05, 0.1, 0.2}) {
      const auto pr = ModelParams::dimensionless(d, tau);
      VectorXd x = VectorXd::Zero(d + 1), z = VectorXd::Zero(d + 1);
      x[d] = 1;
      const auto rep = peaking(CoherentState::at(pr, PhasePoint::make(pr, x, z)));
      CHECK(rep.peak_angle == 0.0);
      INFO(d, " ", tau, " ", rep.width, " ", rep.expected_width);
      CHECK(std::abs(rep.width / rep.expected_width - 1) < 0.2);
    }
  }
}
