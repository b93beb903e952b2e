#include "cssqkd/security.hpp"

#include <cmath>
#include <limits>

namespace cssqkd::security {

namespace {

double entropy_term(const css::ProtocolParams& params) {
  return params.n *
         css::binary_entropy(static_cast<double>(params.r) / params.n);
}

void require_positive_C(double C) {
  if (!(C > 0.0)) throw DomainError("security: C must be > 0");
}

}  // namespace

double security_exponent(const css::ProtocolParams& params, double C,
                         Variant variant) {
  const double nh = entropy_term(params);
  if (variant == Variant::baseline_form)
    return -0.5 * params.k + nh + 2.5;
  require_positive_C(C);
  return -0.5 * params.k + 0.5 * nh + 35.0 / 4.0 + std::log2(std::sqrt(C));
}

double security_level(const css::ProtocolParams& params, double C,
                      Variant variant) {
  return std::exp2(security_exponent(params, C, variant));
}

double security_level_alt_const(const css::ProtocolParams& params, double C) {
  require_positive_C(C);
  const double nh = entropy_term(params);
  return std::exp2(-0.5 * params.k + 0.5 * nh + 21.0 / 4.0 +
                   std::log2(std::sqrt(C)));
}

double diamond_bound(const css::ProtocolParams& params, double C) {
  require_positive_C(C);
  return std::sqrt(C * std::exp2(-params.k + entropy_term(params) + 3.5));
}

double gap_factor(double C) {
  require_positive_C(C);
  return std::exp2(35.0 / 4.0) * std::sqrt(C);
}

double gap_from_formulas(const css::ProtocolParams& params, double C) {
  require_positive_C(C);
  return std::exp2(-0.5 * entropy_term(params) + 25.0 / 4.0) * std::sqrt(C);
}

double gap_discrepancy_exponent(const css::ProtocolParams& params) {
  return 0.5 * entropy_term(params) + 2.5;
}

std::vector<std::string> consistency_check(const css::ProtocolParams& params,
                                           double C) {
  std::vector<std::string> flags;
  // The claimed parameter-free gap and the ratio of the two closed forms
  // always disagree, by exactly 2^{(n/2) h(r/n) + 5/2}.
  flags.push_back("gap-mismatch exponent=" +
                  std::to_string(gap_discrepancy_exponent(params)));
  flags.push_back("additive-constant variants 21/4 and 35/4 both evaluated");
  if (!params.entropy_window_ok())
    flags.push_back("entropy-window violated: 2 n h(r/n) >= 2k");
  if (agreement_bound_constant(params) <= 0.0)
    flags.push_back("agreement constant non-positive: k <= n h(r/n)");
  (void)C;
  return flags;
}

double agreement_bound_constant(const css::ProtocolParams& params) {
  return agreement_bound_constant(params.n, params.k, params.r);
}

double agreement_bound_constant(int n, int k, int r) {
  const double nh = n * css::binary_entropy(static_cast<double>(r) / n);
  return std::exp2(3.5) - std::exp2(-k + nh + 3.5);
}

double estimate_overlap_constant(std::span<const double> braket_values,
                                 double bound_constant) {
  if (braket_values.empty())
    throw ParameterError("estimate_overlap_constant: no values");
  if (bound_constant == 0.0)
    throw DomainError("estimate_overlap_constant: constant is zero");
  double best = std::numeric_limits<double>::infinity();
  for (double v : braket_values) best = std::min(best, v / bound_constant);
  return best;
}

SecurityReport evaluate_cell(const css::ProtocolParams& params, double C) {
  params.validate();
  require_positive_C(C);
  SecurityReport rep;
  rep.n = params.n;
  rep.k = params.k;
  rep.r = params.r;
  rep.C = C;
  rep.entropy_window_ok = params.entropy_window_ok();
  rep.level_protocol = security_level(params, C, Variant::protocol_form);
  rep.level_protocol_alt = security_level_alt_const(params, C);
  rep.level_baseline = security_level(params, C, Variant::baseline_form);
  rep.gap_claimed = gap_factor(C);
  rep.gap_formulas = gap_from_formulas(params, C);
  rep.discrepancy_exponent = gap_discrepancy_exponent(params);
  rep.diamond = diamond_bound(params, C);
  rep.agreement_constant = agreement_bound_constant(params);
  rep.flags = consistency_check(params, C);
  return rep;
}

std::vector<SweepRow> parameter_sweep(std::span<const int> ns,
                                      std::span<const int> ks,
                                      std::span<const int> rs, double C) {
  require_positive_C(C);
  std::vector<SweepRow> rows;
  for (int n : ns) {
    for (int k : ks) {
      for (int r : rs) {
        SweepRow row;
        row.n = n;
        row.k = k;
        row.r = r;
        const css::ProtocolParams params{n, k, r};
        try {
          params.validate();
        } catch (const ParameterError&) {
          row.skipped = true;
          rows.push_back(std::move(row));
          continue;
        }
        row.report = evaluate_cell(params, C);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace cssqkd::security
