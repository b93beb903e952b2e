#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace cssqkd::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Output wrapper common to every subcommand. The timestamp is empty unless
/// explicitly supplied, so identical configurations produce byte-identical
/// files.
struct ReportEnvelope {
  std::string command;
  Json config;
  std::string timestamp;
  std::string status;  // pass | fail | report-only
  Json payload;
};

Json to_json(const ReportEnvelope& envelope);

/// Structural check of the envelope schema: required keys, types, and the
/// status enumeration. On failure, `why` (when given) names the offense.
bool validate_envelope(const Json& j, std::string* why = nullptr);

/// 17-significant-digit decimal rendering; round-trips doubles exactly and
/// is locale-independent.
std::string format_double(double v);

/// Rows joined with commas and LF line endings, header first.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

}  // namespace cssqkd::report
