#include "cssqkd/protocol.hpp"

#include <cmath>
#include <map>

#include "cssqkd/pauli.hpp"
#include "cssqkd/qsim.hpp"

namespace cssqkd::protocol {

EveChannel EveChannel::fixed(css::ErrorPattern pattern) {
  if (pattern.alpha.size() != pattern.beta.size())
    throw DimensionError("EveChannel: alpha/beta lengths differ");
  return EveChannel{Fixed{std::move(pattern)}};
}

EveChannel EveChannel::iid(double p_x, double p_z) {
  if (p_x < 0.0 || p_x > 1.0 || p_z < 0.0 || p_z > 1.0)
    throw DomainError("EveChannel: probabilities outside [0,1]");
  return EveChannel{Iid{p_x, p_z}};
}

css::ErrorPattern EveChannel::draw(int n, Rng& rng) const {
  if (const auto* fixed = std::get_if<Fixed>(&model)) {
    if (fixed->pattern.alpha.size() != n)
      throw DimensionError("EveChannel: pattern length does not match n");
    return fixed->pattern;
  }
  const auto& iid = std::get<Iid>(model);
  css::ErrorPattern p{gf2::BitVector(n), gf2::BitVector(n)};
  for (int i = 0; i < n; ++i) {
    p.alpha.set(i, rng.next_real() < iid.p_x);
    p.beta.set(i, rng.next_real() < iid.p_z);
  }
  return p;
}

Transcript run_protocol(const css::ProtocolParams& params,
                        const css::CssCode& code, const EveChannel& channel,
                        Rng& rng) {
  params.validate();
  Transcript t;
  t.error = channel.draw(params.n, rng);
  t.z_A = gf2::BitVector::random(params.n, rng);
  t.x_A = gf2::BitVector::random(params.n, rng);
  const gf2::BitVector z_B = t.z_A + t.error.alpha;
  const gf2::BitVector x_B = t.x_A + t.error.beta;

  t.u_A = css::syndrome(code.P1, t.z_A);
  t.u_B = css::syndrome(code.P1, z_B);
  t.v_A = css::syndrome(code.P2, t.x_A);
  t.v_B = css::syndrome(code.P2, x_B);

  t.t_z = css::decode_in_ball(code.P1, t.u_A + t.u_B, params.n, params.r);
  t.t_x = css::decode_in_ball(code.P2, t.v_A + t.v_B, params.n, params.r);
  t.accepted = t.t_z.has_value() && t.t_x.has_value();
  if (t.accepted) {
    t.w_A = gf2::mul_vec(code.key_extractor, t.x_A);
    // Bob corrects his extracted key with the decoded phase-flip pattern.
    t.w_B = gf2::mul_vec(code.key_extractor, x_B) +
            gf2::mul_vec(code.key_extractor, *t.t_x);
  }
  return t;
}

KeyOutcome key_outcome(const Transcript& t) {
  KeyOutcome out;
  if (t.accepted) out.keys = std::make_pair(*t.w_A, *t.w_B);
  return out;
}

namespace {

CorrectnessEstimate finish_correctness(std::uint64_t mismatches,
                                       std::uint64_t accepts,
                                       std::uint64_t trials) {
  CorrectnessEstimate est;
  est.mismatches = mismatches;
  est.accepts = accepts;
  est.trials = trials;
  est.mismatch_and_accept =
      trials ? static_cast<double>(mismatches) / static_cast<double>(trials)
             : 0.0;
  est.mismatch_given_accept =
      accepts ? static_cast<double>(mismatches) / static_cast<double>(accepts)
              : 0.0;
  est.sigma_joint =
      trials ? std::sqrt(est.mismatch_and_accept *
                         (1.0 - est.mismatch_and_accept) /
                         static_cast<double>(trials))
             : 0.0;
  return est;
}

}  // namespace

CorrectnessEstimate correctness_probability(const css::ProtocolParams& params,
                                            const EveChannel& channel,
                                            std::uint64_t trials,
                                            std::uint64_t master_seed,
                                            int threads) {
  params.validate();
  std::vector<std::uint8_t> outcome(trials, 0);  // 0 abort, 1 match, 2 mismatch
  for_each_trial(trials, master_seed, threads, [&](std::uint64_t t, Rng& rng) {
    const css::CssCode code = css::sample_css(params, rng);
    const Transcript tr = run_protocol(params, code, channel, rng);
    if (!tr.accepted)
      outcome[t] = 0;
    else
      outcome[t] = (*tr.w_A == *tr.w_B) ? 1 : 2;
  });
  std::uint64_t accepts = 0, mismatches = 0;
  for (auto o : outcome) {
    if (o) ++accepts;
    if (o == 2) ++mismatches;
  }
  return finish_correctness(mismatches, accepts, trials);
}

CorrectnessEstimate correctness_exhaustive(
    const css::ProtocolParams& params, const css::CssCode& code,
    std::span<const css::ErrorPattern> support) {
  params.validate();
  std::uint64_t accepts = 0, mismatches = 0;
  for (const auto& err : support) {
    const auto t_z = css::decode_in_ball(
        code.P1, css::syndrome(code.P1, err.alpha), params.n, params.r);
    const auto t_x = css::decode_in_ball(
        code.P2, css::syndrome(code.P2, err.beta), params.n, params.r);
    if (!t_z || !t_x) continue;
    ++accepts;
    // Key equality is independent of the raw outcomes: the keys differ
    // exactly when the extractor separates beta from its decode.
    if (!gf2::mul_vec(code.key_extractor, err.beta + *t_x).is_zero())
      ++mismatches;
  }
  return finish_correctness(mismatches, accepts, support.size());
}

AbortEstimate abort_probability(const css::ProtocolParams& params,
                                const EveChannel& channel,
                                std::uint64_t trials,
                                std::uint64_t master_seed, int threads) {
  params.validate();
  std::vector<std::uint8_t> aborted(trials, 0);
  for_each_trial(trials, master_seed, threads, [&](std::uint64_t t, Rng& rng) {
    const css::CssCode code = css::sample_css(params, rng);
    const Transcript tr = run_protocol(params, code, channel, rng);
    aborted[t] = tr.accepted ? 0 : 1;
  });
  AbortEstimate est;
  est.trials = trials;
  for (auto a : aborted) est.aborts += a;
  est.rate = trials ? static_cast<double>(est.aborts) /
                          static_cast<double>(trials)
                    : 0.0;
  est.sigma = trials ? std::sqrt(est.rate * (1.0 - est.rate) /
                                 static_cast<double>(trials))
                     : 0.0;
  return est;
}

double secrecy_check_tiny(const css::ProtocolParams& params,
                          const css::CssCode& code, const CVector& eve_state,
                          int env_dim) {
  params.validate();
  const int n = params.n;
  const int k = params.k;
  if (n > 3) throw CapacityError("secrecy_check_tiny: n <= 3 required");
  const Eigen::Index half = Eigen::Index(1) << n;
  const Eigen::Index ab_dim = half * half;
  if (eve_state.size() != ab_dim * env_dim)
    throw DimensionError("secrecy_check_tiny: state dimension mismatch");

  // Each party measures n commuting independent observables: phase-type
  // checks from the first parity block, bit-type checks from the second,
  // and the bit-type key extractor rows. The joint eigenprojectors are
  // rank one, so each outcome string selects a single basis vector.
  std::vector<pauli::PauliElement> gens;
  for (int i = 0; i < k; ++i) gens.push_back(pauli::from_z_mask(code.P1.row(i)));
  for (int i = 0; i < k; ++i) gens.push_back(pauli::from_x_mask(code.P2.row(i)));
  for (int i = 0; i < n - 2 * k; ++i)
    gens.push_back(pauli::from_x_mask(code.key_extractor.row(i)));

  std::vector<CVector> basis;
  basis.reserve(static_cast<std::size_t>(half));
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(half); ++s) {
    const CMatrix proj =
        qsim::pauli_projector(gens, gf2::BitVector::from_index(n, s));
    // extract the unit vector spanning the rank-one range
    Eigen::Index best = 0;
    proj.diagonal().real().maxCoeff(&best);
    CVector v = proj.col(best);
    v /= v.norm();
    basis.push_back(std::move(v));
  }

  const int key_len = params.key_length();
  const Eigen::Index key_space = Eigen::Index(1) << key_len;
  const Eigen::Index c_space = Eigen::Index(1) << (2 * k);

  // Accumulate the environment block of every (key value | abort, transcript)
  // cell. Entry key_space is the abort symbol.
  std::map<std::pair<Eigen::Index, Eigen::Index>, CMatrix> blocks;
  auto block = [&](Eigen::Index w, Eigen::Index c) -> CMatrix& {
    auto it = blocks.find({w, c});
    if (it == blocks.end())
      it = blocks.emplace(std::make_pair(w, c), CMatrix::Zero(env_dim, env_dim))
               .first;
    return it->second;
  };

  for (std::uint64_t sa = 0; sa < static_cast<std::uint64_t>(half); ++sa) {
    for (std::uint64_t sb = 0; sb < static_cast<std::uint64_t>(half); ++sb) {
      CVector gamma = CVector::Zero(env_dim);
      for (Eigen::Index i = 0; i < half; ++i) {
        const Complex ca = std::conj(basis[sa](i));
        if (ca == Complex(0.0)) continue;
        for (Eigen::Index j = 0; j < half; ++j) {
          const Complex cb = std::conj(basis[sb](j));
          if (cb == Complex(0.0)) continue;
          const Eigen::Index ab = i * half + j;
          for (Eigen::Index e = 0; e < env_dim; ++e)
            gamma(e) += ca * cb * eve_state(ab * env_dim + e);
        }
      }
      if (gamma.squaredNorm() < 1e-30) continue;

      const auto bits_a = gf2::BitVector::from_index(n, sa);
      const auto bits_b = gf2::BitVector::from_index(n, sb);
      const auto u_diff = bits_a.slice(0, k) + bits_b.slice(0, k);
      const auto v_diff =
          bits_a.slice(k, 2 * k) + bits_b.slice(k, 2 * k);
      const auto t_z = css::decode_in_ball(code.P1, u_diff, n, params.r);
      const auto t_x = css::decode_in_ball(code.P2, v_diff, n, params.r);
      const Eigen::Index c = static_cast<Eigen::Index>(
          (u_diff.to_index() << k) | v_diff.to_index());
      const bool accept = t_z.has_value() && t_x.has_value();
      const Eigen::Index w =
          accept ? static_cast<Eigen::Index>(
                       bits_a.slice(2 * k, n).to_index())
                 : key_space;
      block(w, c).noalias() += gamma * gamma.adjoint();
    }
  }

  // Transcript-and-environment marginals over the accept branch.
  std::vector<CMatrix> accept_marginal(
      static_cast<std::size_t>(c_space));
  for (Eigen::Index c = 0; c < c_space; ++c)
    accept_marginal[static_cast<std::size_t>(c)] =
        CMatrix::Zero(env_dim, env_dim);
  for (const auto& [key, m] : blocks) {
    if (key.first != key_space)
      accept_marginal[static_cast<std::size_t>(key.second)] += m;
  }

  // Ideal state: abort branch untouched; accept branch uniform over keys.
  double distance = 0.0;
  const double inv_keys = 1.0 / static_cast<double>(key_space);
  for (Eigen::Index c = 0; c < c_space; ++c) {
    for (Eigen::Index w = 0; w < key_space; ++w) {
      CMatrix actual = CMatrix::Zero(env_dim, env_dim);
      if (auto it = blocks.find({w, c}); it != blocks.end())
        actual = it->second;
      const CMatrix ideal =
          inv_keys * accept_marginal[static_cast<std::size_t>(c)];
      distance += qsim::trace_distance(actual, ideal);
    }
  }
  return distance;
}

}  // namespace cssqkd::protocol
