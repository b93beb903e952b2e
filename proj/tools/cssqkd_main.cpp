#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "cssqkd/cli.hpp"
#include "cssqkd/errors.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw cssqkd::ParameterError("not an integer list: " + text);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw cssqkd::ParameterError("empty integer list");
  return out;
}

void add_common_flags(CLI::App* cmd, cssqkd::cli::RunConfig& config,
                      std::string& n_text, std::string& k_text,
                      std::string& r_text) {
  cmd->add_option("--n", n_text, "qubit count (comma list for sweeps)");
  cmd->add_option("--k", k_text, "syndrome length (comma list for sweeps)");
  cmd->add_option("--r", r_text, "error radius (comma list for sweeps)");
  cmd->add_option("--trials", config.trials, "Monte Carlo trials");
  cmd->add_option("--seed", config.seed, "master seed");
  cmd->add_option("--channel", config.channel,
                  "fixed:<hex alpha>:<hex beta> or iid:<px>:<pz>");
  cmd->add_option("--C", config.C, "overlap constant C > 0");
  cmd->add_option("--out", config.out_path, "output path (default stdout)");
  cmd->add_option("--format", config.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", config.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--timestamp", config.timestamp,
                  "timestamp string to embed (omitted by default so outputs "
                  "are reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for two-universal "
               "hashing key distribution over random-matrix CSS codes"};
  app.require_subcommand(1);

  cssqkd::cli::RunConfig config;
  std::string n_text = "4", k_text = "1", r_text = "0";

  auto* verify = app.add_subcommand(
      "verify-identities",
      "check the Bell-basis identities and archive the constrained sums");
  auto* protocol = app.add_subcommand(
      "protocol", "run the hashing protocol and estimate correctness/abort");
  auto* table = app.add_subcommand("security-table",
                                   "sweep the closed-form security levels");
  auto* claims = app.add_subcommand(
      "claim-validators", "archive the desk-scale isometry and prefactor "
                          "reports (report-only)");
  for (CLI::App* cmd : {verify, protocol, table, claims})
    add_common_flags(cmd, config, n_text, k_text, r_text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    config.ns = parse_int_list(n_text);
    config.ks = parse_int_list(k_text);
    config.rs = parse_int_list(r_text);

    cssqkd::report::ReportEnvelope envelope;
    if (verify->parsed()) {
      config.command = "verify-identities";
      envelope = cssqkd::cli::cmd_verify_identities(config);
    } else if (protocol->parsed()) {
      config.command = "protocol";
      envelope = cssqkd::cli::cmd_protocol(config);
    } else if (table->parsed()) {
      config.command = "security-table";
      envelope = cssqkd::cli::cmd_security_table(config);
    } else {
      config.command = "claim-validators";
      envelope = cssqkd::cli::cmd_claim_validators(config);
    }
    return cssqkd::cli::write_output(envelope, config);
  } catch (const cssqkd::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const cssqkd::DimensionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
