#include "sphcs/flat_space.hpp"

#include <algorithm>
#include <cmath>

#include "sphcs/coherent_states.hpp"
#include "sphcs/heat_kernels.hpp"

namespace sphcs {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

FlatParams FlatParams::make(int d, double m, double omega, double hbar) {
  if (d < 1)
    throw UnsupportedDimension(d, "flat space");
  if (!(m > 0) || !(omega > 0) || !(hbar > 0) || !std::isfinite(m) ||
      !std::isfinite(omega) || !std::isfinite(hbar))
    throw InvalidArgument("m, omega and hbar must be positive and finite");
  return FlatParams(d, m, omega, hbar);
}

VectorXcd flat_complexify(const FlatParams &params, const VectorXd &x,
                          const VectorXd &p) {
  if (x.size() != params.d() || p.size() != params.d())
    throw InvalidArgument("x and p must have d components");
  return x.cast<cplx>() + kI * p.cast<cplx>() / (params.m() * params.omega());
}

cplx flat_power_series(const FlatParams &params, const VectorXd &x,
                       const VectorXd &p, int k, int n, int n_terms) {
  if (k < 0 || k >= params.d() || n < 0 || n_terms < 0)
    throw InvalidArgument("bad index, power or term count");
  // ad^j(x_k^n) = (2 p_k)^j n! / (n - j)! x_k^{n - j}
  const cplx step = kI * p[k] / (params.m() * params.omega());
  cplx sum = 0.0, term_pow = 1.0;
  double binom = 1.0;
  for (int j = 0; j < std::min(n_terms, n + 1); ++j) {
    sum += binom * term_pow * std::pow(x[k], n - j);
    binom = binom * (n - j) / (j + 1);
    term_pow *= step;
  }
  return sum;
}

cplx flat_coherent_wavefunction(const FlatParams &params, const VectorXcd &a,
                                const VectorXd &x) {
  if (a.size() != params.d() || x.size() != params.d())
    throw InvalidArgument("a and x must have d components");
  const double s = params.sigma();
  const VectorXcd diff = x.cast<cplx>() - a;
  const cplx sq = diff.cwiseProduct(diff).sum();
  return std::pow(2.0 * kPi * s, -0.5 * params.d()) * std::exp(-sq / (2.0 * s));
}

double flat_gamma(const FlatParams &params, const VectorXd &im_a) {
  const double s = params.sigma();
  return std::pow(kPi * s, -0.5 * params.d()) * std::exp(-im_a.squaredNorm() / s);
}

double flat_nu(int d, double s, const VectorXd &im_a) {
  return std::pow(2.0 * kPi * s, -0.5 * d) *
         std::exp(-im_a.squaredNorm() / (2.0 * s));
}

namespace {

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, 1> hermite_values(int n_max, double sigma, T x) {
  Eigen::Matrix<T, Eigen::Dynamic, 1> h(n_max + 1);
  const T t = x / std::sqrt(sigma);
  h[0] = std::pow(kPi * sigma, -0.25) * std::exp(-0.5 * t * t);
  if (n_max >= 1)
    h[1] = std::sqrt(2.0) * t * h[0];
  for (int n = 2; n <= n_max; ++n)
    h[n] = std::sqrt(2.0 / n) * t * h[n - 1] - std::sqrt((n - 1.0) / n) * h[n - 2];
  return h;
}

} // namespace

VectorXd hermite_functions(int n_max, double sigma, double x) {
  return hermite_values(n_max, sigma, x);
}

std::vector<std::array<int, 2>> HermiteBasis::index() const {
  if (dim != 1 && dim != 2)
    throw UnsupportedDimension(dim, "Hermite basis");
  if (count < 1)
    throw InvalidArgument("basis needs at least one function");
  std::vector<std::array<int, 2>> out;
  if (dim == 1) {
    for (int n = 0; n < count; ++n)
      out.push_back({n, 0});
    return out;
  }
  for (int deg = 0; static_cast<int>(out.size()) < count; ++deg)
    for (int n1 = deg; n1 >= 0 && static_cast<int>(out.size()) < count; --n1)
      out.push_back({n1, deg - n1});
  return out;
}

namespace {

int max_order(const HermiteBasis &basis) {
  int m = 0;
  for (const auto &ix : basis.index())
    m = std::max({m, ix[0], ix[1]});
  return m;
}

// <h_n | psi_a> for a single coordinate, n = 0..n_max. The integrand is
// entire, so the contour is moved to Im x = Im a / 2 where the Gaussian factor
// has no oscillation.
VectorXcd overlaps_1d(int n_max, double sigma, cplx a, const FlatQuad &quad) {
  const double sq = std::sqrt(sigma);
  const double half = quad.half_width > 0 ? quad.half_width
                                          : 10.0 + std::sqrt(2.0 * n_max + 1.0);
  const double c = 0.5 * a.real();
  const double shift = 0.5 * a.imag();
  const Rule rule = gauss_legendre(quad.nodes, c - half * sq, c + half * sq, quad.panels);
  const double norm = 1.0 / std::sqrt(2.0 * kPi * sigma);
  VectorXcd out = VectorXcd::Zero(n_max + 1);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const cplx x{rule.x[i], shift};
    const cplx g = norm * std::exp(-(x - a) * (x - a) / (2.0 * sigma));
    out += (rule.w[i] * g) * hermite_values(n_max, sigma, x);
  }
  return out;
}

VectorXcd combine(const HermiteBasis &basis, const std::vector<VectorXcd> &per_coord) {
  const auto idx = basis.index();
  VectorXcd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[i] = per_coord[0][idx[i][0]];
    if (basis.dim == 2)
      out[i] *= per_coord[1][idx[i][1]];
  }
  return out;
}

} // namespace

VectorXd HermiteBasis::values(const VectorXd &x) const {
  if (x.size() != dim)
    throw InvalidArgument("point dimension does not match the basis");
  const int n = max_order(*this);
  std::vector<VectorXcd> per;
  for (int k = 0; k < dim; ++k)
    per.push_back(hermite_functions(n, sigma, x[k]).cast<cplx>());
  return combine(*this, per).real();
}

VectorXcd flat_overlaps(const HermiteBasis &basis, const VectorXcd &a,
                        const FlatQuad &quad) {
  if (a.size() != basis.dim)
    throw InvalidArgument("label dimension does not match the basis");
  const int n = max_order(basis);
  std::vector<VectorXcd> per;
  for (int k = 0; k < basis.dim; ++k)
    per.push_back(overlaps_1d(n, basis.sigma, a[k], quad));
  return combine(basis, per);
}

MatrixXcd flat_resolution_check(const FlatParams &params, const HermiteBasis &basis,
                                const FlatQuad &quad,
                                const std::function<double(const VectorXd &)> &weight) {
  if (params.d() != basis.dim)
    throw InvalidArgument("basis dimension does not match the parameters");
  if (std::abs(basis.sigma - params.sigma()) > 1e-14 * params.sigma())
    throw InvalidArgument("basis length scale must equal sigma");
  const int d = params.d();
  const int n = max_order(basis);
  const double sq = std::sqrt(params.sigma());
  const double half = 9.0 + 2.0 * std::sqrt(n + 1.0);
  const int nodes = quad.phase_nodes > 0 ? quad.phase_nodes : (d == 1 ? 24 : 16);
  const Rule rule = gauss_legendre(nodes, -half * sq, half * sq, quad.phase_panels);
  const std::size_t m = rule.size();

  // One-coordinate overlaps on the (u, v) grid.
  std::vector<VectorXcd> g(m * m);
  parallel_for(m * m, [&](std::size_t idx) {
    const cplx a{rule.x[idx / m], rule.x[idx % m]};
    g[idx] = overlaps_1d(n, params.sigma(), a, quad);
  });

  const auto ix = basis.index();
  const std::size_t N = ix.size();
  const std::size_t inner = d == 1 ? 1 : m * m;
  auto node_weight = [&](std::size_t n1, std::size_t n2) {
    VectorXd im(d);
    im[0] = rule.x[n1 % m];
    double w = rule.w[n1 / m] * rule.w[n1 % m];
    if (d == 2) {
      im[1] = rule.x[n2 % m];
      w *= rule.w[n2 / m] * rule.w[n2 % m];
    }
    return w * (weight ? weight(im) : flat_gamma(params, im));
  };
  // Full grid over C^d: outer coordinate in parallel, inner summed in place.
  const MatrixXcd M = parallel_sum<MatrixXcd>(
      m * m,
      [&](std::size_t n1) -> MatrixXcd {
        MatrixXcd acc = MatrixXcd::Zero(N, N);
        VectorXcd v(N);
        for (std::size_t n2 = 0; n2 < inner; ++n2) {
          for (std::size_t i = 0; i < N; ++i) {
            v[i] = g[n1][ix[i][0]];
            if (d == 2)
              v[i] *= g[n2][ix[i][1]];
          }
          acc.noalias() += node_weight(n1, n2) * (v.conjugate() * v.transpose());
        }
        return acc;
      },
      MatrixXcd::Zero(N, N));
  return M;
}

cplx flat_inverse(const FlatParams &params,
                  const std::function<cplx(const VectorXcd &)> &F, const VectorXd &x,
                  const FlatQuad &quad) {
  const int d = params.d();
  if (d != 1 && d != 2)
    throw UnsupportedDimension(d, "flat inversion");
  if (x.size() != d)
    throw InvalidArgument("x must have d components");
  const double s = params.sigma();
  const double half = quad.half_width > 0 ? quad.half_width : 14.0;
  const int nodes = quad.phase_nodes > 0 ? quad.phase_nodes : 24;
  const Rule rule = gauss_legendre(nodes, -half * std::sqrt(s),
                                   half * std::sqrt(s), quad.phase_panels);
  const std::size_t m = rule.size();
  const std::size_t total = d == 1 ? m : m * m;
  return parallel_sum<cplx>(total, [&](std::size_t node) {
    VectorXd y(d);
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const std::size_t j = k == 0 ? node % m : node / m;
      y[k] = rule.x[j];
      w *= rule.w[j];
    }
    const VectorXcd a = x.cast<cplx>() + kI * y.cast<cplx>();
    return w * flat_nu(d, s, y) * F(a);
  });
}

FlatOperators flat_operators(const FlatParams &params, int cutoff) {
  const int d = params.d();
  if (d != 1 && d != 2)
    throw UnsupportedDimension(d, "flat operators");
  if (cutoff < 2)
    throw InvalidArgument("cutoff must be at least 2");
  MatrixXcd b = MatrixXcd::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n)
    b(n - 1, n) = std::sqrt(double(n));
  const double s = params.sigma();
  const MatrixXcd x1 = std::sqrt(s / 2.0) * (b + b.adjoint());
  const MatrixXcd p1 = kI * (params.hbar() / std::sqrt(2.0 * s)) * (b.adjoint() - b);
  FlatOperators ops;
  ops.dim = d;
  ops.cutoff = cutoff;
  if (d == 1) {
    ops.X = {x1};
    ops.P = {p1};
  } else {
    const MatrixXcd id = MatrixXcd::Identity(cutoff, cutoff);
    auto kron = [&](const MatrixXcd &A, const MatrixXcd &B) {
      MatrixXcd K(cutoff * cutoff, cutoff * cutoff);
      for (int i = 0; i < cutoff; ++i)
        for (int j = 0; j < cutoff; ++j)
          K.block(i * cutoff, j * cutoff, cutoff, cutoff) = A(i, j) * B;
      return K;
    };
    ops.X = {kron(x1, id), kron(id, x1)};
    ops.P = {kron(p1, id), kron(id, p1)};
  }
  ops.P2 = MatrixXcd::Zero(ops.X[0].rows(), ops.X[0].cols());
  for (const auto &P : ops.P)
    ops.P2 += P * P;
  return ops;
}

MatrixXcd flat_annihilation_series(const FlatParams &params, const FlatOperators &ops,
                                   int k, int n_terms) {
  if (k < 0 || k >= ops.dim)
    throw InvalidArgument("component index out of range");
  const double unit = 2.0 * params.m() * params.omega() * params.hbar();
  MatrixXcd term = ops.X[k];
  MatrixXcd sum = MatrixXcd::Zero(term.rows(), term.cols());
  for (int j = 0; j < n_terms; ++j) {
    sum += term;
    term = (term * ops.P2 - ops.P2 * term) / (unit * (j + 1));
  }
  return sum;
}

std::vector<int> flat_interior(const FlatOperators &ops, int margin) {
  std::vector<int> out;
  const int lim = ops.cutoff - margin;
  for (int i = 0; i < ops.n(); ++i) {
    const int n1 = ops.dim == 1 ? i : i / ops.cutoff;
    const int n2 = ops.dim == 1 ? 0 : i % ops.cutoff;
    if (n1 < lim && n2 < lim)
      out.push_back(i);
  }
  return out;
}

SmallTauReport small_tau_limit_check(int dim, double tau, int samples) {
  if (dim < 1 || dim > 3)
    throw UnsupportedDimension(dim, "small tau comparison");
  if (!(tau > 0) || tau > 0.05)
    throw InvalidArgument("small tau comparison needs 0 < tau <= 0.05");
  SmallTauReport rep;
  rep.tau = tau;
  auto sphere = [&](double th) {
    KernelEvalRequest req;
    req.dim = dim;
    req.time = tau;
    req.argument = th;
    return rho_sphere(req).value.real();
  };
  const double peak = std::pow(2.0 * kPi * tau, -0.5 * dim);
  auto flat = [&](double th) { return peak * std::exp(-th * th / (2.0 * tau)); };
  rep.peak_discrepancy = std::abs(sphere(0.0) - peak) / peak;
  const double reach = 5.0 * std::sqrt(tau);
  for (int i = 0; i <= samples; ++i) {
    const double th = reach * i / samples;
    rep.sup_discrepancy =
        std::max(rep.sup_discrepancy, std::abs(sphere(th) - flat(th)) / peak);
  }
  VectorXcd north = VectorXcd::Zero(dim + 1);
  north[dim] = 1.0;
  const auto s = CoherentState::at(ComplexSpherePoint::make(1.0, north), tau);
  rep.sphere_width = peaking(s).width;
  rep.flat_width = std::sqrt(tau / 2.0);
  rep.expected_width = std::sqrt(tau / 2.0);
  return rep;
}

} // namespace sphcs
