#include "cssqkd/hashing.hpp"

#include <cmath>

namespace cssqkd::hashing {

LinearHashFamily LinearHashFamily::uniform(int n, int k) {
  if (n < 1 || k < 1) throw ParameterError("hash family: n, k must be >= 1");
  return LinearHashFamily{n, k, {}};
}

LinearHashFamily LinearHashFamily::weighted(
    int n, int k, std::vector<std::pair<double, gf2::BitMatrix>> members) {
  if (members.empty()) throw ParameterError("hash family: empty support");
  double total = 0.0;
  for (const auto& [mass, m] : members) {
    if (mass <= 0.0) throw ParameterError("hash family: masses must be > 0");
    if (m.rows() != k || m.cols() != n)
      throw DimensionError("hash family: member shape mismatch");
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ParameterError("hash family: masses must sum to 1");
  return LinearHashFamily{n, k, std::move(members)};
}

namespace {

gf2::BitMatrix matrix_from_counter(int k, int n, std::uint64_t bits) {
  gf2::BitMatrix m(k, n);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < n; ++c)
      m.set(r, c, (bits >> (r * n + c)) & 1u);
  return m;
}

}  // namespace

CollisionReport collision_probability(const LinearHashFamily& family,
                                      const gf2::BitVector& x,
                                      const gf2::BitVector& x_prime,
                                      CollisionMode mode, std::uint64_t trials,
                                      Rng* rng) {
  if (x.size() != family.n || x_prime.size() != family.n)
    throw DimensionError("collision_probability: input length mismatch");
  if (x == x_prime)
    throw ParameterError("collision_probability: inputs must differ");
  const gf2::BitVector d = x + x_prime;

  CollisionReport report;
  report.bound = family.theta();
  report.mode = mode;

  if (mode == CollisionMode::exact) {
    if (family.is_uniform()) {
      const int bits = family.k * family.n;
      if (bits > kExactEnumerationBitCap)
        throw CapacityError("collision_probability: support too large");
      const std::uint64_t total = std::uint64_t(1) << bits;
      std::uint64_t hits = 0;
      for (std::uint64_t c = 0; c < total; ++c) {
        const auto m = matrix_from_counter(family.k, family.n, c);
        if (gf2::mul_vec(m, d).is_zero()) ++hits;
      }
      report.epsilon_hat =
          static_cast<double>(hits) / static_cast<double>(total);
      report.trials = total;
    } else {
      double p = 0.0;
      for (const auto& [mass, m] : family.support)
        if (gf2::mul_vec(m, d).is_zero()) p += mass;
      report.epsilon_hat = p;
      report.trials = family.support.size();
    }
    return report;
  }

  if (trials == 0 || rng == nullptr)
    throw ParameterError("collision_probability: monte carlo needs trials/rng");
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    gf2::BitMatrix m(family.k, family.n);
    if (family.is_uniform()) {
      for (int r = 0; r < family.k; ++r)
        for (int c = 0; c < family.n; ++c) m.set(r, c, rng->next_bit());
    } else {
      double u = rng->next_real();
      std::size_t idx = 0;
      while (idx + 1 < family.support.size() &&
             u >= family.support[idx].first) {
        u -= family.support[idx].first;
        ++idx;
      }
      m = family.support[idx].second;
    }
    if (gf2::mul_vec(m, d).is_zero()) ++hits;
  }
  report.epsilon_hat = static_cast<double>(hits) / static_cast<double>(trials);
  report.trials = trials;
  return report;
}

double union_bound_failure(double theta, std::uint64_t set_size) {
  if (theta < 0.0 || theta > 1.0)
    throw DomainError("union_bound_failure: theta outside [0,1]");
  return std::min(1.0, theta * static_cast<double>(set_size));
}

JointFailureEstimate empirical_joint_failure(const css::ProtocolParams& params,
                                             std::uint64_t trials,
                                             std::uint64_t master_seed,
                                             int threads) {
  params.validate();
  const css::HammingBall ball(params.n, params.r);
  if (ball.volume() > css::kDefaultBallCap)
    throw CapacityError("empirical_joint_failure: ball exceeds cap");

  std::vector<std::uint8_t> outcome(trials, 0);  // bit 0: first fails, bit 1: second
  for_each_trial(trials, master_seed, threads, [&](std::uint64_t t, Rng& rng) {
    const css::CssCode code = css::sample_css(params, rng);
    const gf2::BitVector alpha = ball.sample(rng);
    const gf2::BitVector beta = ball.sample(rng);
    const auto t1 = css::decode_in_ball(code.P1, css::syndrome(code.P1, alpha),
                                        params.n, params.r);
    const auto t2 = css::decode_in_ball(code.P2, css::syndrome(code.P2, beta),
                                        params.n, params.r);
    const bool first_ok = t1 && *t1 == alpha;
    const bool second_ok = t2 && *t2 == beta;
    outcome[t] = static_cast<std::uint8_t>((first_ok ? 0 : 1) |
                                           (second_ok ? 0 : 2));
  });

  JointFailureEstimate est;
  est.trials = trials;
  for (auto o : outcome) {
    if (o == 3) ++est.failures;
    if (o != 0) ++est.failures_either;
  }
  est.rate = trials ? static_cast<double>(est.failures) /
                          static_cast<double>(trials)
                    : 0.0;
  est.rate_either = trials ? static_cast<double>(est.failures_either) /
                                 static_cast<double>(trials)
                           : 0.0;
  est.sigma = trials ? std::sqrt(est.rate * (1.0 - est.rate) /
                                 static_cast<double>(trials))
                     : 0.0;
  return est;
}

}  // namespace cssqkd::hashing
