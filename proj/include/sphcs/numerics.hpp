#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "sphcs/errors.hpp"

namespace sphcs {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Nodes and weights of a one-dimensional quadrature rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1]. Rules are cached per n.
const Rule &gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b], split into `panels` equal panels.
Rule gauss_legendre(int n, double a, double b, int panels = 1);

/// Uniform (trapezoid) rule on a full period [start, start + 2 pi).
Rule periodic_trapezoid(int n, double start = 0.0);

// sinh(z)/z, sin(z)/z, (cosh z - 1)/z^2 with Taylor branches for |z| < 1e-4.
double sinhc(double z);
cplx sinhc(cplx z);
double sinc(double z);
cplx sinc(cplx z);

/// Pairwise (cascade) summation; result depends only on the input order.
template <class T> T pairwise_sum(const T *v, std::size_t n) {
  if (n == 0)
    return T{};
  if (n <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < n; ++i)
      s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

template <class T> T pairwise_sum(const std::vector<T> &v) {
  return pairwise_sum(v.data(), v.size());
}

// Thread pool size used by the parallel helpers. Defaults to the
// SPHCS_THREADS environment variable, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n) on the worker threads. body must only write
/// to slots owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

/// Deterministic parallel sum of f(0) + ... + f(n-1). Items are grouped in
/// fixed blocks independent of the thread count and block partials are
/// combined pairwise, so the result is bitwise reproducible for any pool size.
template <class T, class F> T parallel_sum(std::size_t n, F &&f, T zero = T{}) {
  constexpr std::size_t kBlock = 64;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<T> partial(nblocks, zero);
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    std::vector<T> items;
    items.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i)
      items.push_back(f(i));
    partial[b] = pairwise_sum(items);
  });
  if (partial.empty())
    return zero;
  return pairwise_sum(partial);
}

/// Result of an adaptive integration.
template <class T> struct Integral {
  T value{};
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {
template <class T>
T gl_panel(const std::function<T(double)> &f, double a, double b, int n) {
  const Rule &r = gauss_legendre(n);
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  T s{};
  for (std::size_t i = 0; i < r.size(); ++i)
    s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}
} // namespace detail

/// Globally adaptive Gauss-Legendre integration by interval bisection.
/// Each interval is accepted when its `order`-point estimate agrees with the
/// sum of the estimates on its halves to within its share of abs_tol.
template <class T>
Integral<T> integrate_adaptive(const std::function<T(double)> &f, double a,
                               double b, double abs_tol, int max_depth = 30,
                               int order = 20) {
  const int kN = order;
  Integral<T> out;
  struct Seg {
    double a, b;
    T whole;
    int depth;
  };
  std::vector<Seg> stack{{a, b, detail::gl_panel(f, a, b, kN), 0}};
  out.evaluations += kN;
  const double len = b - a;
  std::vector<T> accepted;
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    const double m = 0.5 * (s.a + s.b);
    T left = detail::gl_panel(f, s.a, m, kN);
    T right = detail::gl_panel(f, m, s.b, kN);
    out.evaluations += 2 * kN;
    const double diff = std::abs(left + right - s.whole);
    const double share = abs_tol * (s.b - s.a) / len;
    if (diff <= share || s.depth >= max_depth) {
      if (diff > share)
        throw QuadratureFailure("adaptive quadrature reached maximum depth");
      accepted.push_back(left + right);
      out.error += diff;
      continue;
    }
    stack.push_back({m, s.b, right, s.depth + 1});
    stack.push_back({s.a, m, left, s.depth + 1});
  }
  out.value = pairwise_sum(accepted);
  return out;
}

} // namespace sphcs
