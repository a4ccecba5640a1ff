#pragma once

#include <cstdint>
#include <string>

#include "mare/problem.hpp"

namespace mare {

/// SplitMix64: the state advances by a fixed odd increment and each output
/// is a bijective mix of the state, so the seed alone fixes the stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

struct FamilySpec {
  Regime regime_target = Regime::SingularNoncritical;
  int n = 1;
  int m = 1;
  std::uint64_t seed = 0;
  double density = 0.5;
};

/// Minimum |drift| accepted for singular noncritical targets.
inline constexpr double kGeneratedDriftMargin = 1e-2;
inline constexpr int kGenerationAttempts = 100;

/// Deterministic generator for the regimes NonsingularK, SingularNoncritical
/// and Critical. Singular draws use K = diag(N·v ./ v) − N for a nonnegative
/// N with a block-upper-triangular pattern in a random ordering, so K·v = 0
/// by construction. Critical draws use a symmetric N and a positive v whose
/// two parts have equal Euclidean norm. Each draw is checked with
/// classify_problem; throws GenerationFailed after 100 rejections.
MareProblem generate(const FamilySpec& spec);

Regime parse_regime(const std::string& text);

}  // namespace mare
