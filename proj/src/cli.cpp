#include "cssqkd/cli.hpp"

#include <fstream>
#include <iostream>
#include <limits>

#include "cssqkd/hashing.hpp"
#include "cssqkd/protocol.hpp"
#include "cssqkd/qsim.hpp"
#include "cssqkd/security.hpp"

namespace cssqkd::cli {

namespace {

using report::Json;
using report::ReportEnvelope;

css::ProtocolParams single_params(const RunConfig& config) {
  if (config.ns.empty() || config.ks.empty() || config.rs.empty())
    throw ParameterError("missing parameter values");
  css::ProtocolParams params{config.ns.front(), config.ks.front(),
                             config.rs.front()};
  params.validate();
  return params;
}

protocol::EveChannel parse_channel(const std::string& spec, int n) {
  const auto first = spec.find(':');
  if (first == std::string::npos)
    throw ParameterError("channel spec must be fixed:<hex>:<hex> or "
                         "iid:<px>:<pz>");
  const std::string kind = spec.substr(0, first);
  const auto second = spec.find(':', first + 1);
  if (second == std::string::npos)
    throw ParameterError("channel spec needs two arguments");
  const std::string a = spec.substr(first + 1, second - first - 1);
  const std::string b = spec.substr(second + 1);
  if (kind == "fixed") {
    return protocol::EveChannel::fixed(
        css::ErrorPattern{gf2::BitVector::parse_hex(a, n),
                          gf2::BitVector::parse_hex(b, n)});
  }
  if (kind == "iid")
    return protocol::EveChannel::iid(std::stod(a), std::stod(b));
  throw ParameterError("unknown channel kind: " + kind);
}

ReportEnvelope make_envelope(const RunConfig& config, std::string status,
                             Json payload) {
  ReportEnvelope env;
  env.command = config.command;
  env.config = config.echo();
  env.timestamp = config.timestamp;
  env.status = std::move(status);
  env.payload = std::move(payload);
  return env;
}

Json json_list(const std::vector<int>& v) {
  Json j = Json::array();
  for (int x : v) j.push_back(x);
  return j;
}

}  // namespace

Json RunConfig::echo() const {
  // The worker count is an execution detail with no effect on results, so it
  // is not echoed; outputs must be byte-identical for any --threads value.
  Json j;
  j["command"] = command;
  j["n"] = json_list(ns);
  j["k"] = json_list(ks);
  j["r"] = json_list(rs);
  j["channel"] = channel;
  j["trials"] = trials;
  j["seed"] = seed;
  j["C"] = C;
  j["format"] = format;
  return j;
}

ReportEnvelope cmd_verify_identities(const RunConfig& config) {
  const int n = config.ns.front();
  if (n < 1 || n > 4) {
    Json payload;
    payload["reason"] =
        "identity suite needs 1 <= n <= 4; register would exceed the dense cap";
    return make_envelope(config, "fail", std::move(payload));
  }

  constexpr double kTol = 1e-10;
  bool pass = true;
  Json checks = Json::array();
  auto record = [&](const std::string& name, int nn, double residual) {
    Json c;
    c["name"] = name;
    c["n"] = nn;
    c["residual"] = residual;
    c["tolerance"] = kTol;
    c["pass"] = residual < kTol;
    pass = pass && residual < kTol;
    checks.push_back(std::move(c));
  };

  for (int nn = 1; nn <= n; ++nn) {
    double worst_z = 0.0, worst_x = 0.0;
    for (std::uint64_t label = 0; label < (std::uint64_t(1) << nn); ++label) {
      const auto bits = gf2::BitVector::from_index(nn, label);
      worst_z = std::max(worst_z, qsim::bell_marginal_residual_z(nn, bits));
      worst_x = std::max(worst_x, qsim::bell_marginal_residual_x(nn, bits));
    }
    record("bell-marginal-z", nn, worst_z);
    record("bell-marginal-x", nn, worst_x);

    // completeness of the Bell family
    const Eigen::Index dim = Eigen::Index(1) << (2 * nn);
    CMatrix acc = CMatrix::Zero(dim, dim);
    for (std::uint64_t a = 0; a < (std::uint64_t(1) << nn); ++a)
      for (std::uint64_t b = 0; b < (std::uint64_t(1) << nn); ++b) {
        const CVector psi =
            qsim::bell_state(nn, gf2::BitVector::from_index(nn, a),
                             gf2::BitVector::from_index(nn, b));
        acc.noalias() += psi * psi.adjoint();
      }
    record("bell-completeness", nn,
           (acc - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff());

    const auto unconstrained = qsim::constrained_bell_sum_residual(nn, false);
    record("unconstrained-sum-z", nn, unconstrained.residual_z);
    record("unconstrained-sum-x", nn, unconstrained.residual_x);
  }

  // The label-constrained decompositions are under test, never asserted.
  Json constrained = Json::array();
  for (int nn = 1; nn <= std::min(n, 2); ++nn) {
    const auto res = qsim::constrained_bell_sum_residual(nn, true);
    Json c;
    c["n"] = nn;
    c["residual_z"] = res.residual_z;
    c["residual_x"] = res.residual_x;
    c["report_only"] = true;
    constrained.push_back(std::move(c));
  }

  Json payload;
  payload["checks"] = std::move(checks);
  payload["constrained_sums"] = std::move(constrained);
  return make_envelope(config, pass ? "pass" : "fail", std::move(payload));
}

ReportEnvelope cmd_protocol(const RunConfig& config) {
  const css::ProtocolParams params = single_params(config);
  const protocol::EveChannel channel = parse_channel(config.channel, params.n);

  const auto correctness = protocol::correctness_probability(
      params, channel, config.trials, config.seed, config.threads);
  const auto abort = protocol::abort_probability(
      params, channel, config.trials, config.seed ^ 0x5EED, config.threads);

  Json payload;
  payload["params"] = {{"n", params.n}, {"k", params.k}, {"r", params.r}};
  payload["correctness"] = {
      {"mismatch_and_accept", correctness.mismatch_and_accept},
      {"mismatch_given_accept", correctness.mismatch_given_accept},
      {"mismatches", correctness.mismatches},
      {"accepts", correctness.accepts},
      {"trials", correctness.trials},
      {"sigma_joint", correctness.sigma_joint}};
  payload["abort"] = {{"rate", abort.rate},
                      {"aborts", abort.aborts},
                      {"trials", abort.trials},
                      {"sigma", abort.sigma}};

  // For enumerable balls, also run the exhaustive in-ball support against a
  // seed-derived code: accepted runs never mismatch under unique decoding.
  const css::HammingBall ball(params.n, params.r);
  if (ball.volume() * ball.volume() <= 4096) {
    Rng rng(substream_seed(config.seed, 1));
    const css::CssCode code = css::sample_css(params, rng);
    std::vector<css::ErrorPattern> support;
    for (const auto& a : ball.enumerate())
      for (const auto& b : ball.enumerate())
        support.push_back(css::ErrorPattern{a, b});
    const auto exhaustive =
        protocol::correctness_exhaustive(params, code, support);
    payload["exhaustive_in_ball"] = {
        {"mismatch_and_accept", exhaustive.mismatch_and_accept},
        {"mismatches", exhaustive.mismatches},
        {"accepts", exhaustive.accepts},
        {"support", exhaustive.trials}};
  } else {
    payload["exhaustive_in_ball"] = nullptr;
  }

  if (params.n <= 3) {
    Rng rng(substream_seed(config.seed, 0));
    const css::CssCode code = css::sample_css(params, rng);
    const double noiseless = protocol::secrecy_check_tiny(
        params, code, qsim::max_entangled(params.n), 1);
    payload["secrecy"] = {{"noiseless_distance", noiseless},
                          {"env_dim", 1}};
  } else {
    payload["secrecy"] = nullptr;
  }
  return make_envelope(config, "pass", std::move(payload));
}

ReportEnvelope cmd_security_table(const RunConfig& config) {
  const auto rows =
      security::parameter_sweep(config.ns, config.ks, config.rs, config.C);
  Json jrows = Json::array();
  for (const auto& row : rows) {
    Json j;
    j["n"] = row.n;
    j["k"] = row.k;
    j["r"] = row.r;
    if (row.skipped) {
      j["status"] = "skip";
    } else {
      j["status"] = "ok";
      j["C"] = row.report.C;
      j["entropy_window_ok"] = row.report.entropy_window_ok;
      j["level_protocol"] = row.report.level_protocol;
      j["level_protocol_alt"] = row.report.level_protocol_alt;
      j["level_baseline"] = row.report.level_baseline;
      j["gap_claimed"] = row.report.gap_claimed;
      j["gap_formulas"] = row.report.gap_formulas;
      j["discrepancy_exponent"] = row.report.discrepancy_exponent;
      j["diamond_bound"] = row.report.diamond;
      j["agreement_constant"] = row.report.agreement_constant;
      j["flags"] = row.report.flags;
    }
    jrows.push_back(std::move(j));
  }
  Json payload;
  payload["rows"] = std::move(jrows);
  return make_envelope(config, "pass", std::move(payload));
}

ReportEnvelope cmd_claim_validators(const RunConfig& config) {
  const int n = config.ns.front();
  const int r = config.rs.front();
  if (n > 2) {
    Json payload;
    payload["reason"] = "claim validators run at n <= 2";
    return make_envelope(config, "fail", std::move(payload));
  }
  if (n < 1 || r < 0 || r > n) {
    Json payload;
    payload["reason"] = "invalid (n, r) for claim validators";
    return make_envelope(config, "fail", std::move(payload));
  }
  // The validators trade the key block away for register size: k is clamped
  // to the largest value with 2k <= n.
  const int k = std::min(config.ks.front(), n / 2);

  // Deterministic ensemble of distinct invertible matrices.
  Rng rng(config.seed);
  std::vector<gf2::BitMatrix> members;
  const int want = n == 1 ? 1 : 2;
  while (static_cast<int>(members.size()) < want) {
    gf2::BitMatrix m = gf2::sample_matrix(n, true, rng);
    bool fresh = true;
    for (const auto& seen : members) fresh = fresh && !(seen == m);
    if (fresh) members.push_back(std::move(m));
  }
  const auto ensemble = qsim::MatrixEnsemble::uniform(std::move(members));

  const qsim::ValidatorSetup setup{ensemble.members.front().second, k, r};
  const gf2::BitVector zero_signs =
      k > 0 ? gf2::BitVector(k) : gf2::BitVector();
  const auto prefactor = qsim::commutation_prefactor_report(
      setup, zero_signs, zero_signs, zero_signs, zero_signs);

  Json jpref;
  jpref["t_prime"] = prefactor.t_prime;
  jpref["t_closed"] = prefactor.t_closed;
  jpref["sum_closed"] = prefactor.sum_closed;
  jpref["f_ratio"] = prefactor.f_ratio;
  jpref["residual"] = prefactor.residual;
  jpref["singular_denominator"] = prefactor.singular_denominator;
  jpref["singular_terms"] = prefactor.singular_terms;

  // Closed-form sanity row: uniform product terms t give sum 8t/(t+7).
  const double demo_t = 2.0;
  std::array<double, 8> uniform_terms;
  uniform_terms.fill(demo_t);
  const auto demo = qsim::prefactor_closed_forms(uniform_terms);
  double demo_sum = 0.0;
  for (double d : demo) demo_sum += d;
  jpref["uniform_demo"] = {{"t", demo_t},
                           {"sum_closed", demo_sum},
                           {"expected", 8.0 * demo_t / (demo_t + 7.0)}};

  Json jagree = Json::array();
  std::vector<double> braket_values;
  double bound_constant = 0.0;
  for (const auto sector :
       {qsim::AgreementSector::bit_flip, qsim::AgreementSector::phase_flip}) {
    const auto rep = qsim::isometry_agreement_report(k, r, ensemble, sector);
    Json j;
    j["sector"] =
        sector == qsim::AgreementSector::bit_flip ? "bit-flip" : "phase-flip";
    j["min_eigenvalue"] = rep.min_eigenvalue;
    j["trace_scalar"] = rep.trace_scalar;
    j["bound_constant"] = rep.bound_constant;
    j["bound_satisfied_operator"] = rep.bound_satisfied_operator;
    j["bound_satisfied_scalar"] = rep.bound_satisfied_scalar;
    j["ensemble_size"] = rep.ensemble_size;
    jagree.push_back(std::move(j));
    braket_values.push_back(rep.trace_scalar);
    bound_constant = rep.bound_constant;
  }

  Json payload;
  payload["shape"] = {{"n", n}, {"k", k}, {"r", r}};
  payload["prefactor"] = std::move(jpref);
  payload["agreement"] = std::move(jagree);
  if (bound_constant == 0.0)
    payload["estimated_C"] = nullptr;  // degenerate shape, constant cancels
  else
    payload["estimated_C"] =
        security::estimate_overlap_constant(braket_values, bound_constant);
  return make_envelope(config, "report-only", std::move(payload));
}

std::string render(const report::ReportEnvelope& envelope,
                   const RunConfig& config) {
  if (config.format == "csv" && envelope.command == "security-table") {
    std::vector<std::string> header = {
        "n", "k", "r", "status", "C", "entropy_window_ok",
        "level_protocol", "level_protocol_alt", "level_baseline",
        "gap_claimed", "gap_formulas", "discrepancy_exponent",
        "diamond_bound", "agreement_constant", "flags"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : envelope.payload.at("rows")) {
      std::vector<std::string> cells;
      cells.push_back(std::to_string(row.at("n").get<int>()));
      cells.push_back(std::to_string(row.at("k").get<int>()));
      cells.push_back(std::to_string(row.at("r").get<int>()));
      const std::string status = row.at("status").get<std::string>();
      cells.push_back(status);
      if (status == "skip") {
        while (cells.size() < header.size()) cells.push_back("");
      } else {
        cells.push_back(report::format_double(row.at("C").get<double>()));
        cells.push_back(row.at("entropy_window_ok").get<bool>() ? "1" : "0");
        for (const char* key :
             {"level_protocol", "level_protocol_alt", "level_baseline",
              "gap_claimed", "gap_formulas", "discrepancy_exponent",
              "diamond_bound", "agreement_constant"})
          cells.push_back(
              report::format_double(row.at(key).get<double>()));
        std::string flags;
        for (const auto& f : row.at("flags")) {
          if (!flags.empty()) flags.push_back(';');
          flags += f.get<std::string>();
        }
        cells.push_back(flags);
      }
      rows.push_back(std::move(cells));
    }
    return report::to_csv(header, rows);
  }
  return report::to_json(envelope).dump(2) + "\n";
}

int write_output(const report::ReportEnvelope& envelope,
                 const RunConfig& config) {
  const std::string text = render(envelope, config);
  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) throw ParameterError("cannot open output file: " + config.out_path);
    out << text;
  }
  return envelope.status == "fail" ? 1 : 0;
}

}  // namespace cssqkd::cli
