#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>

#include "cssqkd/css.hpp"
#include "cssqkd/types.hpp"

namespace cssqkd::protocol {

/// Error channel acting on the shared pairs: either a fixed bit/phase-flip
/// pattern or i.i.d. flips with the given per-qubit probabilities.
struct EveChannel {
  struct Fixed {
    css::ErrorPattern pattern;
  };
  struct Iid {
    double p_x = 0.0;
    double p_z = 0.0;
  };
  std::variant<Fixed, Iid> model;

  static EveChannel fixed(css::ErrorPattern pattern);
  static EveChannel iid(double p_x, double p_z);

  css::ErrorPattern draw(int n, Rng& rng) const;
};

/// One protocol run. Keys are present exactly when both decodes succeed.
struct Transcript {
  css::ErrorPattern error;
  gf2::BitVector z_A, x_A;            // raw measurement outcomes, length n
  gf2::BitVector u_A, u_B, v_A, v_B;  // syndromes, length k
  std::optional<gf2::BitVector> t_z, t_x;
  std::optional<gf2::BitVector> w_A, w_B;  // keys, length n - 2k
  bool accepted = false;
};

struct KeyOutcome {
  std::optional<std::pair<gf2::BitVector, gf2::BitVector>> keys;  // accept
  bool aborted() const { return !keys.has_value(); }
};

/// Error-vector run of the hashing protocol: draw the error, derive both
/// parties' syndromes, decode the syndrome differences inside the radius-r
/// ball, and on acceptance extract keys, correcting the second party's key
/// with the decoded phase-flip pattern.
Transcript run_protocol(const css::ProtocolParams& params,
                        const css::CssCode& code, const EveChannel& channel,
                        Rng& rng);

KeyOutcome key_outcome(const Transcript& t);

struct CorrectnessEstimate {
  double mismatch_and_accept = 0.0;  // joint probability
  double mismatch_given_accept = 0.0;
  std::uint64_t mismatches = 0;
  std::uint64_t accepts = 0;
  std::uint64_t trials = 0;
  double sigma_joint = 0.0;
};

/// Monte Carlo estimate over freshly sampled codes; deterministic for a
/// fixed master seed regardless of thread count.
CorrectnessEstimate correctness_probability(const css::ProtocolParams& params,
                                            const EveChannel& channel,
                                            std::uint64_t trials,
                                            std::uint64_t master_seed,
                                            int threads = 1);

/// Exhaustive enumeration of a finite error support against one code, with
/// the raw outcomes marginalized out (key equality depends only on the drawn
/// error and the decodes).
CorrectnessEstimate correctness_exhaustive(
    const css::ProtocolParams& params, const css::CssCode& code,
    std::span<const css::ErrorPattern> support);

struct AbortEstimate {
  double rate = 0.0;
  std::uint64_t aborts = 0;
  std::uint64_t trials = 0;
  double sigma = 0.0;
};

AbortEstimate abort_probability(const css::ProtocolParams& params,
                                const EveChannel& channel,
                                std::uint64_t trials,
                                std::uint64_t master_seed, int threads = 1);

/// Trace distance between the coherently evaluated key/transcript/environment
/// state of one protocol run and the ideal state whose key register is
/// uniform and uncorrelated on acceptance. `eve_state` is a purification of
/// the shared input on A (x) B (x) E with the given environment dimension.
/// Dense evaluation; n <= 3.
double secrecy_check_tiny(const css::ProtocolParams& params,
                          const css::CssCode& code, const CVector& eve_state,
                          int env_dim);

}  // namespace cssqkd::protocol
