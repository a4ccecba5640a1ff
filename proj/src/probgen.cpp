#include "mare/probgen.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "mare/error.hpp"

namespace mare {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

Regime parse_regime(const std::string& text) {
  if (text == "nonsingular") return Regime::NonsingularK;
  if (text == "singular-noncritical") return Regime::SingularNoncritical;
  if (text == "critical") return Regime::Critical;
  throw Error(ErrorCode::InvalidInput, "unknown regime \"" + text + "\"");
}

namespace {

using Index = Eigen::Index;

std::vector<Index> shuffled(Index count, SplitMix64& rng) {
  std::vector<Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Index{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

double weight(SplitMix64& rng) { return rng.uniform(0.1, 1.0); }

/// Nonnegative off-diagonal part with a block-upper-triangular pattern in a
/// random ordering. Each diagonal block carries a cycle through all of its
/// nodes and every block but the last couples to a later one.
Matrix reducible_pattern(Index size, bool allow_one_block_only, double density, SplitMix64& rng) {
  const Index max_blocks = std::min<Index>(3, size - 1);
  const Index blocks = allow_one_block_only ? 1 : 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_blocks)));

  // Sizes: last block ≥ 2 (a singular irreducible block needs off-diagonal
  // entries to keep a positive diagonal), others ≥ 1.
  std::vector<Index> sizes(static_cast<std::size_t>(blocks), 1);
  sizes.back() = 2;
  for (Index extra = size - (blocks + 1); extra > 0; --extra) sizes[rng.below(static_cast<std::uint64_t>(blocks))] += 1;

  const std::vector<Index> order = shuffled(size, rng);
  std::vector<Index> block_of(static_cast<std::size_t>(size));
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(blocks));
  Index pos = 0;
  for (Index b = 0; b < blocks; ++b) {
    for (Index t = 0; t < sizes[static_cast<std::size_t>(b)]; ++t, ++pos) {
      const Index node = order[static_cast<std::size_t>(pos)];
      block_of[static_cast<std::size_t>(node)] = b;
      members[static_cast<std::size_t>(b)].push_back(node);
    }
  }

  Matrix nmat = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = 0; j < size; ++j) {
      if (i == j || block_of[static_cast<std::size_t>(i)] > block_of[static_cast<std::size_t>(j)]) continue;
      if (rng.uniform() < density) nmat(i, j) = weight(rng);
    }
  }
  for (Index b = 0; b < blocks; ++b) {
    const auto& nodes = members[static_cast<std::size_t>(b)];
    if (nodes.size() >= 2) {
      for (std::size_t t = 0; t < nodes.size(); ++t) {
        const Index i = nodes[t];
        const Index j = nodes[(t + 1) % nodes.size()];
        if (nmat(i, j) == 0.0) nmat(i, j) = weight(rng);
      }
    }
    if (b + 1 < blocks) {
      const Index i = nodes[rng.below(nodes.size())];
      std::vector<Index> later;
      for (Index c = b + 1; c < blocks; ++c) {
        later.insert(later.end(), members[static_cast<std::size_t>(c)].begin(), members[static_cast<std::size_t>(c)].end());
      }
      const Index j = later[rng.below(later.size())];
      if (nmat(i, j) == 0.0) nmat(i, j) = weight(rng);
    }
  }
  return nmat;
}

Matrix symmetric_pattern(Index size, double density, SplitMix64& rng) {
  Matrix nmat = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = i + 1; j < size; ++j) {
      if (rng.uniform() < density) nmat(i, j) = nmat(j, i) = weight(rng);
    }
  }
  const std::vector<Index> order = shuffled(size, rng);
  for (std::size_t t = 0; t + 1 < order.size(); ++t) {
    const Index i = order[t];
    const Index j = order[t + 1];
    if (nmat(i, j) == 0.0) nmat(i, j) = nmat(j, i) = weight(rng);
  }
  return nmat;
}

Matrix singular_from(const Matrix& nmat, const Vector& v) {
  const Vector nv = nmat * v;
  Matrix k = -nmat;
  for (Index i = 0; i < k.rows(); ++i) k(i, i) = nv(i) / v(i);
  return k;
}

MareProblem split(const Matrix& k, Index n, std::string name) {
  const Index m = k.rows() - n;
  Matrix d = k.topLeftCorner(n, n);
  Matrix c = -k.topRightCorner(n, m);
  Matrix b = -k.bottomLeftCorner(m, n);
  Matrix a = k.bottomRightCorner(m, m);
  // -0.0 from negation would otherwise leak into serialized output.
  c.array() += 0.0;
  b.array() += 0.0;
  return MareProblem(std::move(a), std::move(b), std::move(c), std::move(d), std::move(name));
}

Matrix draw_k(const FamilySpec& spec, SplitMix64& rng) {
  const Index n = spec.n;
  const Index size = spec.n + spec.m;
  switch (spec.regime_target) {
    case Regime::Critical: {
      const Matrix nmat = symmetric_pattern(size, spec.density, rng);
      Vector v(size);
      for (Index i = 0; i < size; ++i) v(i) = rng.uniform(0.5, 1.5);
      // Equal Euclidean norms of the two parts make u₁ᵀv₁ = u₂ᵀv₂ when u = v.
      v.tail(size - n) *= v.head(n).norm() / v.tail(size - n).norm();
      return singular_from(nmat, v);
    }
    case Regime::SingularNoncritical:
    case Regime::NonsingularK: {
      const Matrix nmat = reducible_pattern(size, size == 2, spec.density, rng);
      Vector v(size);
      for (Index i = 0; i < size; ++i) v(i) = rng.uniform(0.5, 1.5);
      Matrix k = singular_from(nmat, v);
      if (spec.regime_target == Regime::NonsingularK) {
        for (Index i = 0; i < size; ++i) k(i, i) += rng.uniform(0.05, 0.5) * std::max(k(i, i), 0.1);
      }
      return k;
    }
    default:
      throw Error(ErrorCode::InvalidInput, "generator targets are NonsingularK, SingularNoncritical and Critical");
  }
}

}  // namespace

MareProblem generate(const FamilySpec& spec) {
  if (spec.n < 1 || spec.m < 1) throw Error(ErrorCode::InvalidInput, "n and m must be at least 1");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw Error(ErrorCode::InvalidInput, "density must lie in (0, 1]");

  std::ostringstream name;
  name << to_string(spec.regime_target) << "-n" << spec.n << "-m" << spec.m << "-seed" << spec.seed;
  const std::uint64_t salt = (static_cast<std::uint64_t>(spec.regime_target) << 48) ^
                             (static_cast<std::uint64_t>(spec.n) << 32) ^ (static_cast<std::uint64_t>(spec.m) << 16);
  SplitMix64 rng(spec.seed ^ salt);

  std::string reason = "no attempt made";
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    const Matrix k = draw_k(spec, rng);
    const MareProblem p = split(k, spec.n, name.str());
    if (!(p.a().diagonal().maxCoeff() > 0.0) || !(p.d().diagonal().maxCoeff() > 0.0)) {
      reason = "nonpositive max diagonal";
      continue;
    }
    const ProblemClass cls = classify_problem(p);
    if (cls.regime != spec.regime_target) {
      reason = "classified as " + std::string(to_string(cls.regime));
      continue;
    }
    if (spec.regime_target == Regime::SingularNoncritical && std::abs(cls.nulls->drift) < kGeneratedDriftMargin) {
      reason = "drift " + std::to_string(cls.nulls->drift) + " inside the margin";
      continue;
    }
    return p;
  }
  throw Error(ErrorCode::GenerationFailed, "after " + std::to_string(kGenerationAttempts) + " draws: " + reason);
}

}  // namespace mare
