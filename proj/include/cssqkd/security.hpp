#pragma once

#include <span>
#include <string>
#include <vector>

#include "cssqkd/css.hpp"

namespace cssqkd::security {

enum class Variant { protocol_form, baseline_form };

/// Closed-form security level.
///   protocol_form: 2^{-k/2 + (n/2) h(r/n) + 35/4 + log2 sqrt(C)}
///   baseline_form: 2^{-k/2 + n h(r/n) + 5/2}   (C unused)
double security_level(const css::ProtocolParams& params, double C,
                      Variant variant);

/// Exponent of the protocol-form level, exposed for exact cross-checks.
double security_exponent(const css::ProtocolParams& params, double C,
                         Variant variant);

/// Variant of the protocol-form level with the additive constant 21/4 that
/// appears in an intermediate step instead of the stated 35/4. Both are
/// reported; see consistency_check.
double security_level_alt_const(const css::ProtocolParams& params, double C);

/// sqrt(C * 2^{-k + n h(r/n) + 7/2}).
double diamond_bound(const css::ProtocolParams& params, double C);

/// Claimed parameter-free gap between the two levels: 2^{35/4} sqrt(C).
double gap_factor(double C);

/// Ratio actually implied by the two closed forms:
/// 2^{-(n/2) h(r/n) + 25/4} sqrt(C).
double gap_from_formulas(const css::ProtocolParams& params, double C);

/// Exponent by which the claimed gap and the formula ratio disagree:
/// (n/2) h(r/n) + 5/2. Always positive, so the flag is raised at every cell.
double gap_discrepancy_exponent(const css::ProtocolParams& params);

/// Named inconsistency flags for a parameter cell. Never asserted.
std::vector<std::string> consistency_check(const css::ProtocolParams& params,
                                           double C);

/// 2^{7/2} - 2^{-k + n h(r/n) + 7/2}; positive iff k > n h(r/n).
double agreement_bound_constant(const css::ProtocolParams& params);
double agreement_bound_constant(int n, int k, int r);

/// Minimum over reported agreement values of value / constant.
double estimate_overlap_constant(std::span<const double> braket_values,
                                 double bound_constant);

struct SecurityReport {
  int n = 0;
  int k = 0;
  int r = 0;
  double C = 1.0;
  bool entropy_window_ok = true;
  double level_protocol = 0.0;
  double level_protocol_alt = 0.0;
  double level_baseline = 0.0;
  double gap_claimed = 0.0;
  double gap_formulas = 0.0;
  double discrepancy_exponent = 0.0;
  double diamond = 0.0;
  double agreement_constant = 0.0;
  std::vector<std::string> flags;
};

SecurityReport evaluate_cell(const css::ProtocolParams& params, double C);

struct SweepRow {
  int n = 0;
  int k = 0;
  int r = 0;
  bool skipped = false;  // shape-invalid triple
  SecurityReport report;
};

/// Cartesian sweep in lexicographic (n, k, r) order. Shape-invalid triples
/// are emitted with the skip marker set.
std::vector<SweepRow> parameter_sweep(std::span<const int> ns,
                                      std::span<const int> ks,
                                      std::span<const int> rs, double C);

}  // namespace cssqkd::security
