#include "sphcs/harmonics.hpp"

#include <cstdlib>

namespace sphcs {

void BasisSpec::validate() const {
  if (dim != 1 && dim != 2)
    throw UnsupportedDimension(dim, "operator bases exist for d = 1, 2");
  if (cutoff < 2)
    throw InvalidArgument("basis cutoff must be >= 2");
  if (interior() < 0 || interior() > cutoff - 2)
    throw InvalidArgument("interior_cutoff must lie in [0, cutoff - 2]");
}

int BasisSpec::size() const {
  return dim == 1 ? 2 * cutoff + 1 : (cutoff + 1) * (cutoff + 1);
}

int BasisSpec::degree(int i) const {
  if (dim == 1)
    return std::abs(i - cutoff);
  int l = static_cast<int>(std::sqrt(static_cast<double>(i)));
  while (l * l > i)
    --l;
  while ((l + 1) * (l + 1) <= i)
    ++l;
  return l;
}

int BasisSpec::order(int i) const {
  if (dim == 1)
    return i - cutoff;
  const int l = degree(i);
  return i - l * l - l;
}

int BasisSpec::index(int l, int m) const {
  if (dim == 1)
    return m + cutoff;
  return l * l + l + m;
}

Eigen::VectorXcd spherical_harmonics(int lmax, const Eigen::VectorXcd &a) {
  if (a.size() != 3)
    throw InvalidArgument("spherical harmonics need a point in C^3");
  const int n = (lmax + 1) * (lmax + 1);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  const cplx z = a[2];
  const cplx up = a[0] + kI * a[1];
  const cplx down = a[0] - kI * a[1];
  // q(l, m) = N_lm d^m P_l / dz^m, N_lm = sqrt((2l+1)/4pi (l-m)!/(l+m)!).
  double qmm = 1.0 / std::sqrt(4.0 * kPi);
  cplx up_m = 1.0, down_m = 1.0;
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) {
      qmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      up_m *= up;
      down_m *= down;
    }
    const double sign = (m & 1) ? -1.0 : 1.0;
    auto store = [&](int l, cplx q) {
      out[l * l + l + m] = sign * q * up_m;
      if (m > 0)
        out[l * l + l - m] = q * down_m;
    };
    cplx q2 = 0.0, q1 = qmm;
    store(m, qmm);
    for (int l = m + 1; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l, m2 = static_cast<double>(m) * m;
      const double al = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double bl =
          l == m + 1 ? 0.0
                     : std::sqrt(((l - 1.0) * (l - 1.0) - m2) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const cplx q = al * (z * q1 - bl * q2);
      q2 = q1;
      q1 = q;
      store(l, q);
    }
  }
  return out;
}

Eigen::VectorXcd basis_values(const BasisSpec &spec, const Eigen::VectorXcd &a) {
  if (a.size() != spec.dim + 1)
    throw InvalidArgument("point dimension does not match basis");
  if (spec.dim == 2)
    return spherical_harmonics(spec.cutoff, a);
  const int N = spec.cutoff;
  Eigen::VectorXcd out(2 * N + 1);
  const double c = 1.0 / std::sqrt(2.0 * kPi);
  const cplx up = a[0] + kI * a[1], down = a[0] - kI * a[1];
  cplx pu = 1.0, pd = 1.0;
  for (int n = 0; n <= N; ++n) {
    out[N + n] = c * pu;
    out[N - n] = c * pd;
    pu *= up;
    pd *= down;
  }
  return out;
}

Eigen::VectorXcd conj_basis_values(const BasisSpec &spec,
                                   const Eigen::VectorXcd &a) {
  const Eigen::VectorXcd v = basis_values(spec, a);
  Eigen::VectorXcd out(v.size());
  for (int i = 0; i < spec.size(); ++i) {
    const int m = spec.order(i);
    if (spec.dim == 1) {
      out[i] = v[spec.index(0, -m)];
    } else {
      const int l = spec.degree(i);
      out[i] = ((m & 1) ? -1.0 : 1.0) * v[spec.index(l, -m)];
    }
  }
  return out;
}

} // namespace sphcs
