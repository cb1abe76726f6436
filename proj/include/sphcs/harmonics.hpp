#pragma once

#include <Eigen/Dense>

#include "sphcs/numerics.hpp"

namespace sphcs {

/// Truncated orthonormal basis of L^2(S^d) at r = 1.
///   d = 1: e_n = e^{i n theta} / sqrt(2 pi), |n| <= cutoff, index n + cutoff.
///   d = 2: Y_{l,m} (Condon-Shortley), l <= cutoff, index l^2 + l + m.
struct BasisSpec {
  int dim = 1;
  int cutoff = 16;
  int interior_cutoff = -1; // -1 selects cutoff - 2

  void validate() const;
  int size() const;
  int interior() const { return interior_cutoff < 0 ? cutoff - 2 : interior_cutoff; }
  /// Degree l (d = 2) or |n| (d = 1) of basis vector i.
  int degree(int i) const;
  /// m (d = 2) or n (d = 1) of basis vector i.
  int order(int i) const;
  /// Basis index of (l, m) for d = 2, of n for d = 1 (l ignored).
  int index(int l, int m) const;
};

/// Values of the basis functions continued holomorphically to the unit
/// complex sphere, in basis order. For real a they are e_i(a).
Eigen::VectorXcd basis_values(const BasisSpec &spec, const Eigen::VectorXcd &a);

/// Holomorphic continuation of conj(e_i) evaluated at a: for d = 1,
/// (a1 - i a2)^n / sqrt(2 pi) (n >= 0) and (a1 + i a2)^{|n|} / sqrt(2 pi)
/// (n < 0); for d = 2, (-1)^m Y_{l,-m}(a).
Eigen::VectorXcd conj_basis_values(const BasisSpec &spec,
                                   const Eigen::VectorXcd &a);

/// Y_{l,m}(a) for all l <= lmax, |m| <= l at a point of the unit complex
/// 2-sphere, index l^2 + l + m. Built from normalized associated-Legendre
/// recurrences in a3 times (a1 +- i a2)^|m|.
Eigen::VectorXcd spherical_harmonics(int lmax, const Eigen::VectorXcd &a);

} // namespace sphcs
