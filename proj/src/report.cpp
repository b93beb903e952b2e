#include "cssqkd/report.hpp"

#include <cstdio>

namespace cssqkd::report {

Json to_json(const ReportEnvelope& envelope) {
  Json j;
  j["version"] = kToolVersion;
  j["command"] = envelope.command;
  j["config"] = envelope.config;
  j["timestamp"] = envelope.timestamp;
  j["status"] = envelope.status;
  j["payload"] = envelope.payload;
  return j;
}

bool validate_envelope(const Json& j, std::string* why) {
  auto fail = [&](const char* reason) {
    if (why) *why = reason;
    return false;
  };
  if (!j.is_object()) return fail("envelope is not an object");
  for (const char* key : {"version", "command", "config", "timestamp",
                          "status", "payload"})
    if (!j.contains(key)) return fail("missing required key");
  if (!j["version"].is_string() || !j["command"].is_string() ||
      !j["timestamp"].is_string() || !j["status"].is_string())
    return fail("string field has wrong type");
  if (!j["config"].is_object()) return fail("config is not an object");
  if (!j["payload"].is_object()) return fail("payload is not an object");
  const std::string status = j["status"].get<std::string>();
  if (status != "pass" && status != "fail" && status != "report-only")
    return fail("status outside enumeration");
  return true;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  append_row(header);
  for (const auto& row : rows) append_row(row);
  return out;
}

}  // namespace cssqkd::report
