#include <doctest.h>

#include <random>

#include "sphcs/spectral_basis.hpp"

using namespace sphcs;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd unit3(double th, double ph) {
  VectorXcd a(3);
  a << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
  return a;
}

} // namespace

TEST_CASE("basis indexing") {
  BasisSpec s{2, 5, -1};
  CHECK(s.size() == 36);
  CHECK(s.interior() == 3);
  for (int i = 0; i < s.size(); ++i)
    CHECK(s.index(s.degree(i), s.order(i)) == i);
  BasisSpec c{1, 4, -1};
  CHECK(c.size() == 9);
  CHECK(c.degree(0) == 4);
  CHECK(c.order(0) == -4);
  CHECK_THROWS_AS(BasisSpec({3, 5, -1}).validate(), UnsupportedDimension);
  CHECK_THROWS_AS(BasisSpec({2, 5, 4}).validate(), InvalidArgument);
}

TEST_CASE("spherical harmonics closed forms") {
  const double th = 0.7, ph = -1.1;
  const VectorXcd a = unit3(th, ph);
  const VectorXcd y = spherical_harmonics(3, a);
  const cplx e = std::exp(kI * ph);
  const double ct = std::cos(th), st = std::sin(th);
  CHECK(std::abs(y[0] - 1 / std::sqrt(4 * kPi)) < 1e-15);
  CHECK(std::abs(y[2] - std::sqrt(3 / (4 * kPi)) * ct) < 1e-15);
  CHECK(std::abs(y[3] + std::sqrt(3 / (8 * kPi)) * st * e) < 1e-15);
  CHECK(std::abs(y[1] - std::sqrt(3 / (8 * kPi)) * st / e) < 1e-15);
  CHECK(std::abs(y[6] - std::sqrt(5 / (16 * kPi)) * (3 * ct * ct - 1)) < 1e-15);
  CHECK(std::abs(y[8] - std::sqrt(15 / (32 * kPi)) * st * st * e * e) < 1e-15);
  CHECK(std::abs(y[7] + std::sqrt(15 / (8 * kPi)) * st * ct * e) < 1e-15);
  CHECK(std::abs(y[12] - std::sqrt(7 / (16 * kPi)) * (5 * ct * ct * ct - 3 * ct)) < 1e-14);
}

TEST_CASE("spherical harmonics are orthonormal under quadrature") {
  const int L = 8;
  const Rule &g = gauss_legendre(L + 2);
  const Rule t = periodic_trapezoid(2 * L + 2);
  const int n = (L + 1) * (L + 1);
  MatrixXcd G = MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double z = g.x[i], s = std::sqrt(1 - z * z);
      VectorXcd a(3);
      a << s * std::cos(t.x[j]), s * std::sin(t.x[j]), z;
      const VectorXcd y = spherical_harmonics(L, a);
      G += g.w[i] * t.w[j] * y.conjugate() * y.transpose();
    }
  CHECK((G - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("conjugate basis values continue conj(e_i)") {
  for (int dim : {1, 2}) {
    BasisSpec s{dim, 6, -1};
    VectorXcd a = dim == 1 ? VectorXcd(2) : unit3(1.2, 0.4);
    if (dim == 1)
      a << std::cos(0.9), std::sin(0.9);
    CHECK((conj_basis_values(s, a) - basis_values(s, a).conjugate()).cwiseAbs().maxCoeff() <
          1e-14);
  }
}

TEST_CASE("multiplication matrices match harmonics pointwise") {
  const auto pr = ModelParams::make(2, 1.0, 1.0, 1.0, 0.5);
  const BasisSpec s{2, 7, -1};
  const auto ops = build_basis(s, pr);
  const VectorXcd a = unit3(0.8, 2.3);
  const VectorXcd y = basis_values(s, a);
  // (x_k f)(a) with f = e_j: sum_i X_ij e_i(a) = a_k e_j(a) for l_j < cutoff.
  for (int k = 0; k < 3; ++k) {
    const VectorXcd lhs = ops.X[k].transpose() * y;
    for (int j = 0; j < s.size(); ++j)
      if (s.degree(j) < s.cutoff)
        CHECK(std::abs(lhs[j] - a[k] * y[j]) < 1e-13);
  }
}

TEST_CASE("e(d+1) relations, d = 1") {
  const auto pr = ModelParams::make(1, 1.4, 0.7, 1.3, 0.6);
  const auto ops = build_basis(BasisSpec{1, 12, -1}, pr);
  const auto rep = euclidean_algebra_check(ops);
  for (const auto &it : rep.items) {
    INFO(it.name);
    CHECK(it.residual <= 1e-13);
  }
  CHECK(constraint_residual(ops) <= 1e-13);
}

TEST_CASE("e(d+1) relations, d = 2") {
  const auto pr = ModelParams::make(2, 1.4, 0.7, 1.3, 0.6);
  const auto ops = build_basis(BasisSpec{2, 10, -1}, pr);
  const auto rep = euclidean_algebra_check(ops);
  for (const auto &it : rep.items) {
    INFO(it.name);
    CHECK(it.residual <= 1e-10);
  }
  CHECK(lx_residual_d2(ops) <= 1e-12);
  CHECK(lx_casimir_check_d2(ops) <= 1e-10);
}

TEST_CASE("truncation only spoils the boundary") {
  const auto pr = ModelParams::dimensionless(2, 0.5);
  BasisSpec s{2, 6, 6};
  // The full-block norm of X^2 - r^2 sees the top degree.
  const auto ops = build_basis(BasisSpec{2, 6, -1}, pr);
  MatrixXcd x2 = -MatrixXcd::Identity(ops.n(), ops.n());
  for (int k = 0; k < 3; ++k)
    x2 += ops.X[k] * ops.X[k];
  CHECK(interior_norm(ops, x2, 2) < 1e-14);
  CHECK(x2.cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("annihilation operator examples, d = 1") {
  const auto pr = ModelParams::dimensionless(1, 1.0);
  const auto base = build_basis(BasisSpec{1, 8, -1}, pr);
  const auto ops = build_annihilation(base, 1.0);
  const int N = 8;
  VectorXcd e0 = VectorXcd::Zero(ops.n());
  e0[N] = 1.0;
  const VectorXcd v = (ops.A[0] + kI * ops.A[1]) * e0;
  VectorXcd want = VectorXcd::Zero(ops.n());
  want[N + 1] = std::exp(-0.5);
  CHECK((v - want).cwiseAbs().maxCoeff() < 1e-15);

  const auto zero = build_annihilation(base, 0.0);
  for (int k = 0; k < 2; ++k)
    CHECK((zero.A[k] - base.X[k]).cwiseAbs().maxCoeff() == 0.0);
  const auto ex = build_annihilation_explicit(base, 0.0);
  const auto po = build_annihilation_polar(base, 0.0);
  for (int k = 0; k < 2; ++k) {
    CHECK((ex[k] - base.X[k]).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((po[k] - base.X[k]).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("annihilation identities and equivalent forms") {
  for (int dim : {1, 2}) {
    for (double hbar : {1.0, 0.3}) {
      const auto pr = ModelParams::make(dim, 1.2, 0.8, 1.1, hbar);
      const auto base = build_basis(BasisSpec{dim, dim == 1 ? 14 : 9, -1}, pr);
      for (double tau : {0.1, 0.3, 1.0}) {
        const auto ops = build_annihilation(base, tau);
        const auto rep = annihilation_check(ops);
        for (const auto &it : rep.items) {
          if (it.name == "nonnormality")
            continue;
          INFO(dim, " ", hbar, " ", tau, " ", it.name);
          CHECK(it.residual <= (dim == 1 ? 1e-13 : 1e-10));
        }
      }
    }
  }
}

TEST_CASE("annihilation operators are not normal for tau > 0") {
  const auto pr = ModelParams::dimensionless(2, 0.5);
  const auto base = build_basis(BasisSpec{2, 8, -1}, pr);
  CHECK(annihilation_check(build_annihilation(base, 0.5)).items.back().residual > 1e-3);
}

TEST_CASE("annihilation overflow guard") {
  const auto pr = ModelParams::dimensionless(1, 1.0);
  const auto base = build_basis(BasisSpec{1, 60, -1}, pr);
  CHECK_THROWS_AS(build_annihilation(base, 1.0), OverflowGuard);
  CHECK_THROWS_AS(build_annihilation(base, -0.1), InvalidArgument);
}
