#pragma once

#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace cssqkd {

inline constexpr std::uint64_t kDefaultSeed = 0xC55C0DEull;

/// Deterministic 64-bit generator. One instance per logical stream; never
/// shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  int next_bit() { return static_cast<int>(engine_() >> 63); }

  /// Uniform integer in [0, bound) by rejection, bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives the seed of an independent substream. Trial results depend only on
/// (master, index), never on which worker ran the trial.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Runs `fn(trial, rng)` for trial = 0..trials-1 across `threads` workers.
/// Each trial gets its own substream, so the set of per-trial results is
/// identical for any worker count; callers must make fn's side effects
/// per-trial (e.g. write into a slot indexed by `trial`).
template <class Fn>
void for_each_trial(std::uint64_t trials, std::uint64_t master_seed,
                    int threads, Fn&& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || trials < 2) {
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng(substream_seed(master_seed, t));
      fn(t, rng);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([=, &fn]() {
      for (std::uint64_t t = static_cast<std::uint64_t>(w); t < trials;
           t += static_cast<std::uint64_t>(threads)) {
        Rng rng(substream_seed(master_seed, t));
        fn(t, rng);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cssqkd
