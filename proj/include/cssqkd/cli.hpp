#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cssqkd/report.hpp"
#include "cssqkd/rng.hpp"

namespace cssqkd::cli {

/// Parsed command invocation. `ns`/`ks`/`rs` carry the (possibly singleton)
/// parameter lists; single-cell commands use the first entry of each.
struct RunConfig {
  std::string command;
  std::vector<int> ns{4};
  std::vector<int> ks{1};
  std::vector<int> rs{0};
  std::string channel = "iid:0:0";
  std::uint64_t trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  double C = 1.0;
  std::string out_path;           // empty writes to stdout
  std::string format = "json";    // json | csv
  int threads = 1;
  std::string timestamp;          // empty keeps outputs reproducible

  report::Json echo() const;
};

report::ReportEnvelope cmd_verify_identities(const RunConfig& config);
report::ReportEnvelope cmd_protocol(const RunConfig& config);
report::ReportEnvelope cmd_security_table(const RunConfig& config);
report::ReportEnvelope cmd_claim_validators(const RunConfig& config);

/// Serializes the envelope per config.format. CSV is only defined for the
/// security table; other commands fall back to JSON.
std::string render(const report::ReportEnvelope& envelope,
                   const RunConfig& config);

/// Renders and writes the report. Returns the process exit code implied by
/// the envelope status: 0 for pass/report-only, 1 for fail.
int write_output(const report::ReportEnvelope& envelope,
                 const RunConfig& config);

}  // namespace cssqkd::cli
