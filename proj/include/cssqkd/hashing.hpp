#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cssqkd/css.hpp"
#include "cssqkd/gf2.hpp"

namespace cssqkd::hashing {

inline constexpr int kExactEnumerationBitCap = 20;  // enumerate up to 2^20 maps

/// Family of linear maps F_2^n -> F_2^k given by k x n matrices. An empty
/// support means the uniform distribution over all such matrices; an explicit
/// support carries its own masses (each > 0, summing to 1).
struct LinearHashFamily {
  int n = 1;
  int k = 1;
  std::vector<std::pair<double, gf2::BitMatrix>> support;

  bool is_uniform() const { return support.empty(); }

  static LinearHashFamily uniform(int n, int k);
  static LinearHashFamily weighted(
      int n, int k, std::vector<std::pair<double, gf2::BitMatrix>> members);

  /// Collision bound of the uniform family: any fixed nonzero difference is
  /// annihilated by exactly a 2^-k fraction of matrices.
  double theta() const { return std::pow(2.0, -k); }
};

enum class CollisionMode { exact, monte_carlo };

struct CollisionReport {
  double epsilon_hat = 0.0;
  double bound = 0.0;
  std::uint64_t trials = 0;
  CollisionMode mode = CollisionMode::exact;
};

/// P[h(x) = h(x')] over the family. Exact mode enumerates the support
/// (uniform families require k*n <= 20); Monte Carlo mode samples matrices
/// from a seeded stream.
CollisionReport collision_probability(const LinearHashFamily& family,
                                      const gf2::BitVector& x,
                                      const gf2::BitVector& x_prime,
                                      CollisionMode mode,
                                      std::uint64_t trials = 0,
                                      Rng* rng = nullptr);

/// min(1, theta * set_size).
double union_bound_failure(double theta, std::uint64_t set_size);

struct JointFailureEstimate {
  double rate = 0.0;         // both decoders fail (the bounded event)
  double rate_either = 0.0;  // at least one fails, for reference
  std::uint64_t failures = 0;
  std::uint64_t failures_either = 0;
  std::uint64_t trials = 0;
  double sigma = 0.0;  // binomial standard error of `rate`
};

/// Over `trials` freshly sampled codes and error pairs drawn uniformly from
/// the radius-r ball, the fraction of trials in which both syndrome decoders
/// fail to reproduce their true error (`rate`; this is the event the
/// collision budget bounds), alongside the fraction where at least one
/// fails. Deterministic for a fixed master seed regardless of `threads`.
JointFailureEstimate empirical_joint_failure(const css::ProtocolParams& params,
                                             std::uint64_t trials,
                                             std::uint64_t master_seed,
                                             int threads = 1);

}  // namespace cssqkd::hashing
