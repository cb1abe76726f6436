#include "sphcs/spectral_basis.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace sphcs {

using Eigen::MatrixXcd;

namespace {

MatrixXcd zero(int n) { return MatrixXcd::Zero(n, n); }

void build_d1(OperatorSet &ops) {
  const int n = ops.n(), N = ops.spec.cutoff;
  MatrixXcd up = zero(n);
  for (int i = 0; i + 1 < n; ++i)
    up(i + 1, i) = 1.0;
  const MatrixXcd down = up.adjoint();
  ops.X = {ops.r * 0.5 * (up + down), ops.r * (up - down) / (2.0 * kI)};
  ops.J.assign(2, MatList(2, zero(n)));
  for (int i = 0; i < n; ++i)
    ops.J[0][1](i, i) = -ops.hbar * (i - N);
  ops.J[1][0] = -ops.J[0][1];
}

void build_d2(OperatorSet &ops) {
  const BasisSpec &s = ops.spec;
  const int n = ops.n(), L = s.cutoff;
  MatrixXcd z = zero(n), up = zero(n), down = zero(n);
  MatrixXcd lz = zero(n), lp = zero(n), lm = zero(n);
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int j = s.index(l, m);
      const double dl = l, dm = m;
      auto put = [&](MatrixXcd &M, int l2, int m2, double v) {
        if (l2 < 0 || l2 > L || std::abs(m2) > l2)
          return;
        M(s.index(l2, m2), j) += v;
      };
      put(z, l + 1, m,
          std::sqrt(((dl + 1) * (dl + 1) - dm * dm) / ((2 * dl + 1) * (2 * dl + 3))));
      if (l > 0)
        put(z, l - 1, m, std::sqrt((dl * dl - dm * dm) / ((2 * dl - 1) * (2 * dl + 1))));
      put(up, l + 1, m + 1,
          -std::sqrt((dl + dm + 1) * (dl + dm + 2) / ((2 * dl + 1) * (2 * dl + 3))));
      if (l > 0)
        put(up, l - 1, m + 1,
            std::sqrt((dl - dm) * (dl - dm - 1) / ((2 * dl - 1) * (2 * dl + 1))));
      put(down, l + 1, m - 1,
          std::sqrt((dl - dm + 1) * (dl - dm + 2) / ((2 * dl + 1) * (2 * dl + 3))));
      if (l > 0)
        put(down, l - 1, m - 1,
            -std::sqrt((dl + dm) * (dl + dm - 1) / ((2 * dl - 1) * (2 * dl + 1))));
      lz(j, j) = ops.hbar * dm;
      put(lp, l, m + 1, ops.hbar * std::sqrt(dl * (dl + 1) - dm * (dm + 1)));
      put(lm, l, m - 1, ops.hbar * std::sqrt(dl * (dl + 1) - dm * (dm - 1)));
    }
  }
  ops.X = {ops.r * 0.5 * (up + down), ops.r * (up - down) / (2.0 * kI), ops.r * z};
  const MatrixXcd lx = 0.5 * (lp + lm), ly = (lp - lm) / (2.0 * kI);
  ops.J.assign(3, MatList(3, zero(n)));
  ops.J[0][1] = -lz;
  ops.J[1][2] = -lx;
  ops.J[0][2] = ly;
  for (int k = 0; k < 3; ++k)
    for (int l = k + 1; l < 3; ++l)
      ops.J[l][k] = -ops.J[k][l];
}

double jtilde(int dim, double lambda) {
  return std::sqrt(lambda + 0.25 * (dim - 1) * (dim - 1));
}

int interior_degree(const OperatorSet &ops, int nx) {
  return std::min(ops.spec.interior(), ops.spec.cutoff - nx);
}

} // namespace

OperatorSet build_position_operators(const BasisSpec &spec,
                                     const ModelParams &params) {
  spec.validate();
  if (params.d() != spec.dim)
    throw InvalidArgument("basis dimension does not match model parameters");
  OperatorSet ops;
  ops.spec = spec;
  ops.r = params.r();
  ops.hbar = params.hbar();
  const int n = ops.n(), d = spec.dim;
  ops.lambda.resize(n);
  for (int i = 0; i < n; ++i) {
    const int l = spec.degree(i);
    ops.lambda[i] = static_cast<double>(l) * (l + d - 1);
  }
  if (d == 1)
    build_d1(ops);
  else
    build_d2(ops);
  return ops;
}

OperatorSet build_basis(const BasisSpec &spec, const ModelParams &params) {
  OperatorSet ops = build_position_operators(spec, params);
  const int n = ops.n(), d = spec.dim, D = d + 1;
  const double h = ops.hbar, r2 = ops.r * ops.r;
  ops.J2 = zero(n);
  ops.Jscalar = zero(n);
  for (int i = 0; i < n; ++i) {
    ops.J2(i, i) = h * h * ops.lambda[i];
    ops.Jscalar(i, i) = h * jtilde(d, ops.lambda[i]);
  }
  ops.P.assign(D, zero(n));
  for (int k = 0; k < D; ++k)
    for (int l = 0; l < D; ++l)
      if (k != l)
        ops.P[k] += ops.J[k][l] * ops.X[l] / r2;

  MatrixXcd x2 = zero(n);
  for (int m = 0; m < D; ++m)
    x2 += ops.X[m] * ops.X[m];
  // JX[k] = sum_m J_km X_m
  MatList jx(D, zero(n));
  for (int k = 0; k < D; ++k)
    for (int m = 0; m < D; ++m)
      if (k != m)
        jx[k] += ops.J[k][m] * ops.X[m];
  ops.W.assign(D, MatList(D, zero(n)));
  ops.C = zero(n);
  for (int k = 0; k < D; ++k)
    for (int l = k + 1; l < D; ++l) {
      ops.W[k][l] = x2 * ops.J[k][l] - jx[k] * ops.X[l] + jx[l] * ops.X[k];
      ops.W[l][k] = -ops.W[k][l];
      ops.C += ops.W[k][l] * ops.W[k][l];
    }
  return ops;
}

OperatorSet build_annihilation(OperatorSet ops, double tau) {
  if (!(tau >= 0))
    throw InvalidArgument("tau must be >= 0");
  const double top = 0.5 * tau * ops.lambda.maxCoeff();
  if (top > 700.0)
    throw OverflowGuard("tau * l(l+d-1) / 2 = " + std::to_string(top) +
                        " overflows; lower the cutoff");
  const int n = ops.n(), D = ops.dim() + 1;
  ops.tau = tau;
  ops.A.assign(D, zero(n));
  for (int k = 0; k < D; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const cplx x = ops.X[k](i, j);
        if (x != 0.0)
          ops.A[k](i, j) = x * std::exp(0.5 * tau * (ops.lambda[j] - ops.lambda[i]));
      }
  return ops;
}

MatList build_annihilation_explicit(const OperatorSet &ops, double tau) {
  const int n = ops.n(), d = ops.dim(), D = d + 1;
  if (tau * (jtilde(d, ops.lambda.maxCoeff()) + 0.5) > 700.0)
    throw OverflowGuard("explicit annihilation operator overflows");
  const double pre = std::exp(0.5 * tau);
  Eigen::VectorXcd f(n), g(n);
  for (int i = 0; i < n; ++i) {
    const double s = jtilde(d, ops.lambda[i]);
    const double sh = tau * sinhc(tau * s); // sinh(tau s) / s
    f[i] = pre * (std::cosh(tau * s) + 0.5 * (d - 1) * sh);
    g[i] = kI * pre * ops.r * ops.r / ops.hbar * sh;
  }
  MatList out(D);
  for (int k = 0; k < D; ++k)
    out[k] = f.asDiagonal() * ops.X[k] + g.asDiagonal() * ops.P[k];
  return out;
}

MatList build_annihilation_polar(const OperatorSet &ops, double tau) {
  const int n = ops.n(), d = ops.dim(), D = d + 1;
  const double h = ops.hbar, r2 = ops.r * ops.r;
  Eigen::VectorXcd alpha(n), beta(n);
  for (int i = 0; i < n; ++i) {
    const double p2 = h * h * ops.lambda[i] / r2;
    Eigen::Matrix2cd jm;
    jm << 0.0, -p2, r2, kI * h * (d - 1.0);
    const Eigen::Matrix2cd e =
        ((kI * jm + 0.5 * h * d * Eigen::Matrix2cd::Identity()) * (tau / h)).exp();
    // coordinates of exp(...) X on the (X, P) "basis"
    alpha[i] = e(0, 0);
    beta[i] = e(1, 0);
  }
  MatList out(D);
  for (int k = 0; k < D; ++k)
    out[k] = alpha.asDiagonal() * ops.X[k] + beta.asDiagonal() * ops.P[k];
  return out;
}

double interior_norm(const OperatorSet &ops, const MatrixXcd &M, int nx) {
  const int top = interior_degree(ops, nx);
  double best = 0.0;
  for (int j = 0; j < ops.n(); ++j) {
    if (ops.spec.degree(j) > top)
      continue;
    for (int i = 0; i < ops.n(); ++i)
      if (ops.spec.degree(i) <= top)
        best = std::max(best, std::abs(M(i, j)));
  }
  return best;
}

double scaled_interior_norm(const OperatorSet &ops, const MatrixXcd &M, int nx,
                            double tau, int power) {
  const int top = interior_degree(ops, nx), d = ops.dim();
  double best = 0.0;
  for (int j = 0; j < ops.n(); ++j) {
    if (ops.spec.degree(j) > top)
      continue;
    for (int i = 0; i < ops.n(); ++i) {
      if (ops.spec.degree(i) > top)
        continue;
      const double s = std::max(jtilde(d, ops.lambda[i]), jtilde(d, ops.lambda[j]));
      best = std::max(best, std::abs(M(i, j)) * std::exp(-power * tau * s));
    }
  }
  return best;
}

double CheckReport::max_residual() const {
  double m = 0.0;
  for (const auto &it : items)
    m = std::max(m, it.residual);
  return m;
}

double constraint_residual(const OperatorSet &ops) {
  const int D = ops.dim() + 1;
  double m = 0.0;
  for (int k = 0; k < D; ++k)
    for (int l = k + 1; l < D; ++l)
      m = std::max(m, interior_norm(ops, ops.W[k][l], 2));
  return m;
}

CheckReport euclidean_algebra_check(const OperatorSet &ops) {
  const int n = ops.n(), d = ops.dim(), D = d + 1;
  const double h = ops.hbar, r2 = ops.r * ops.r;
  const cplx ih = kI * h;
  const MatrixXcd I = MatrixXcd::Identity(n, n);
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  auto comm = [](const MatrixXcd &a, const MatrixXcd &b) -> MatrixXcd {
    return a * b - b * a;
  };
  CheckReport rep;

  double jj = 0, xj = 0, xx = 0, xp = 0, xw = 0, jw = 0, w = 0, wh = 0;
  for (int k = 0; k < D; ++k)
    for (int l = 0; l < D; ++l) {
      xx = std::max(xx, interior_norm(ops, comm(ops.X[k], ops.X[l]), 2));
      const MatrixXcd e = comm(ops.X[k], ops.P[l]) / ih -
                          (delta(k, l) * I - ops.X[k] * ops.X[l] / r2);
      xp = std::max(xp, interior_norm(ops, e, 2));
      for (int m = 0; m < D; ++m) {
        const MatrixXcd ex = comm(ops.X[k], ops.J[l][m]) / ih -
                             (delta(k, l) * ops.X[m] - delta(k, m) * ops.X[l]);
        xj = std::max(xj, interior_norm(ops, ex, 1));
        xw = std::max(xw, interior_norm(ops, comm(ops.X[k], ops.W[l][m]) / ih, 3));
        for (int q = 0; q < D; ++q) {
          const MatrixXcd ej =
              comm(ops.J[k][l], ops.J[m][q]) / ih -
              (delta(k, q) * ops.J[l][m] + delta(l, m) * ops.J[k][q] -
               delta(k, m) * ops.J[l][q] - delta(l, q) * ops.J[k][m]);
          jj = std::max(jj, interior_norm(ops, ej, 0));
          const MatrixXcd ew =
              comm(ops.J[k][l], ops.W[m][q]) / ih -
              (delta(k, q) * ops.W[l][m] + delta(l, m) * ops.W[k][q] -
               delta(k, m) * ops.W[l][q] - delta(l, q) * ops.W[k][m]);
          jw = std::max(jw, interior_norm(ops, ew, 2));
        }
      }
      if (k < l) {
        w = std::max(w, interior_norm(ops, ops.W[k][l], 2));
        wh = std::max(wh, interior_norm(ops, ops.W[k][l] - ops.W[k][l].adjoint(), 2));
      }
    }
  rep.add("[J,J]", jj);
  rep.add("[X,J]", xj);
  rep.add("[X,X]", xx);

  MatrixXcd x2 = -r2 * I, px = MatrixXcd::Zero(n, n), xpd = -ih * double(d) * I;
  MatrixXcd j2 = -ops.J2;
  for (int k = 0; k < D; ++k) {
    x2 += ops.X[k] * ops.X[k];
    px += ops.P[k] * ops.X[k];
    xpd += ops.X[k] * ops.P[k];
    for (int l = k + 1; l < D; ++l)
      j2 += ops.J[k][l] * ops.J[k][l];
  }
  rep.add("X^2=r^2", interior_norm(ops, x2, 2));
  rep.add("J^2=sum J_kl^2", interior_norm(ops, j2, 0));
  rep.add("[X,P]", xp);
  rep.add("P.X=0", interior_norm(ops, px, 2));
  rep.add("X.P=i hbar d", interior_norm(ops, xpd, 2));

  double jx = 0, jp = 0;
  const MatrixXcd p2 = ops.J2 / r2;
  for (int k = 0; k < D; ++k) {
    MatrixXcd a = -r2 * ops.P[k], b = p2 * ops.X[k] - ih * (d - 1.0) * ops.P[k];
    for (int l = 0; l < D; ++l) {
      a += ops.J[k][l] * ops.X[l];
      b += ops.J[k][l] * ops.P[l];
    }
    jx = std::max(jx, interior_norm(ops, a, 1));
    jp = std::max(jp, interior_norm(ops, b, 2));
  }
  rep.add("JX=r^2 P", jx);
  rep.add("JP=-P^2 X+i hbar (d-1) P", jp);
  rep.add("[X,W]=0", xw);
  rep.add("[J,W]", jw);
  rep.add("W=0", w);
  rep.add("W Hermitian", wh);
  rep.add("C=0", interior_norm(ops, ops.C, 4));
  return rep;
}

CheckReport annihilation_check(const OperatorSet &ops) {
  if (ops.A.empty())
    throw InvalidArgument("annihilation operators not built");
  const int n = ops.n(), D = ops.dim() + 1;
  const double tau = ops.tau, r2 = ops.r * ops.r;
  CheckReport rep;
  MatrixXcd a2 = -r2 * MatrixXcd::Identity(n, n);
  double comm = 0.0;
  for (int k = 0; k < D; ++k) {
    a2 += ops.A[k] * ops.A[k];
    for (int l = k + 1; l < D; ++l)
      comm = std::max(comm, scaled_interior_norm(
                                ops, ops.A[k] * ops.A[l] - ops.A[l] * ops.A[k], 2, tau, 2));
  }
  rep.add("sum A^2=r^2", scaled_interior_norm(ops, a2, 2, tau, 2));
  rep.add("[A_k,A_l]=0", comm);
  const MatList ex = build_annihilation_explicit(ops, tau);
  const MatList po = build_annihilation_polar(ops, tau);
  double de = 0.0, dp = 0.0;
  for (int k = 0; k < D; ++k) {
    de = std::max(de, scaled_interior_norm(ops, ex[k] - ops.A[k], 1, tau, 1));
    dp = std::max(dp, scaled_interior_norm(ops, po[k] - ops.A[k], 1, tau, 1));
  }
  rep.add("explicit=conjugation", de);
  rep.add("polar=conjugation", dp);
  rep.add("nonnormality",
          interior_norm(ops, ops.A[0] * ops.A[0].adjoint() - ops.A[0].adjoint() * ops.A[0], 2));
  return rep;
}

namespace {
MatrixXcd l_dot_x(const OperatorSet &ops) {
  if (ops.dim() != 2)
    throw UnsupportedDimension(ops.dim(), "L.X is defined for d = 2");
  // L = (J_32, J_13, J_21)
  return ops.J[2][1] * ops.X[0] + ops.J[0][2] * ops.X[1] + ops.J[1][0] * ops.X[2];
}
} // namespace

double lx_casimir_check_d2(const OperatorSet &ops) {
  const MatrixXcd lx = l_dot_x(ops);
  MatrixXcd x2 = MatrixXcd::Zero(ops.n(), ops.n());
  for (int k = 0; k < 3; ++k)
    x2 += ops.X[k] * ops.X[k];
  return interior_norm(ops, ops.C - x2 * lx * lx, 4);
}

double lx_residual_d2(const OperatorSet &ops) {
  return interior_norm(ops, l_dot_x(ops), 1);
}

} // namespace sphcs
