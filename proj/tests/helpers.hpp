#pragma once

#include <cstdint>
#include <initializer_list>

#include "mare/linalg.hpp"
#include "mare/probgen.hpp"

namespace mare::testing {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix out(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) out(i, j++) = x;
    ++i;
  }
  return out;
}

inline Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Matrix random_matrix(SplitMix64& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
  Matrix out(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = rng.uniform(lo, hi);
  return out;
}

/// Random nonnegative matrix with roughly `density` of its entries nonzero.
inline Matrix random_nonneg(SplitMix64& rng, Eigen::Index r, Eigen::Index c, double density = 1.0) {
  Matrix out = Matrix::Zero(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (rng.uniform() < density) out(i, j) = rng.uniform();
  return out;
}

/// Diagonally dominant, hence well conditioned.
inline Matrix random_well_conditioned(SplitMix64& rng, Eigen::Index n) {
  Matrix out = random_matrix(rng, n, n);
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) += (rng.uniform() < 0.5 ? -1.0 : 1.0) * (static_cast<double>(n) + 1.0);
  return out;
}

inline Matrix permutation_matrix(SplitMix64& rng, Eigen::Index n) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, order[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

}  // namespace mare::testing
