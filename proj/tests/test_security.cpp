#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cssqkd/security.hpp"

using namespace cssqkd;
using css::ProtocolParams;
using security::Variant;

namespace {

// Independent long-double evaluation of the closed forms.
long double entropy_ld(long double p) {
  if (p <= 0.0L || p >= 1.0L) return 0.0L;
  return -p * std::log2(p) - (1.0L - p) * std::log2(1.0L - p);
}

long double level_protocol_ld(int n, int k, int r, long double c) {
  const long double nh = n * entropy_ld(static_cast<long double>(r) / n);
  return std::exp2(-0.5L * k + 0.5L * nh + 35.0L / 4.0L +
                   std::log2(std::sqrt(c)));
}

long double level_baseline_ld(int n, int k, int r) {
  const long double nh = n * entropy_ld(static_cast<long double>(r) / n);
  return std::exp2(-0.5L * k + nh + 2.5L);
}

bool close_rel(double a, long double b, double tol = 1e-12) {
  return std::abs(a - static_cast<double>(b)) <=
         tol * std::max(1.0, std::abs(static_cast<double>(b)));
}

}  // namespace

TEST_CASE("closed-form levels") {
  // r = 0, C = 1: exponent collapses to -k/2 + 35/4
  const ProtocolParams p1{8, 3, 0};
  CHECK(security::security_level(p1, 1.0, Variant::protocol_form) ==
        doctest::Approx(std::exp2(-1.5 + 8.75)).epsilon(1e-13));

  const ProtocolParams p2{8, 4, 1};
  CHECK(close_rel(security::security_level(p2, 1.0, Variant::baseline_form),
                  level_baseline_ld(8, 4, 1)));
  CHECK(close_rel(security::security_level(p2, 1.0, Variant::protocol_form),
                  level_protocol_ld(8, 4, 1, 1.0L)));

  CHECK_THROWS_AS(
      security::security_level(p2, 0.0, Variant::protocol_form), DomainError);
  CHECK_THROWS_AS(
      security::security_level(p2, -2.0, Variant::protocol_form), DomainError);
}

TEST_CASE("exponent arithmetic at the degenerate corner") {
  // with r = 0 and C = 1 the protocol-form exponent is -k/2 + 35/4 exactly
  const ProtocolParams p{9, 4, 0};
  CHECK(security::security_exponent(p, 1.0, Variant::protocol_form) ==
        doctest::Approx(-2.0 + 8.75).epsilon(1e-14));
}

TEST_CASE("diamond bound") {
  const ProtocolParams p{9, 4, 0};
  CHECK(security::diamond_bound(p, 1.0) ==
        doctest::Approx(std::exp2(-0.25)).epsilon(1e-13));
  // scaling in C
  const ProtocolParams q{8, 3, 1};
  CHECK(security::diamond_bound(q, 4.0) ==
        doctest::Approx(2.0 * security::diamond_bound(q, 1.0))
            .epsilon(1e-13));
  const ProtocolParams w{8, 3, 1};
  const long double nh = 8.0L * entropy_ld(1.0L / 8.0L);
  CHECK(close_rel(security::diamond_bound(w, 1.0),
                  std::sqrt(std::exp2(-3.0L + nh + 3.5L))));
  // squared bound recovers C exactly
  for (double c : {0.5, 1.0, 3.0}) {
    const double d = security::diamond_bound(w, c);
    CHECK(d * d / std::exp2(-3.0 + static_cast<double>(nh) + 3.5) ==
          doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("gap factor and its documented mismatch") {
  CHECK(security::gap_factor(1.0) ==
        doctest::Approx(std::exp2(8.75)).epsilon(1e-13));
  CHECK(security::gap_factor(1.0) == doctest::Approx(430.539).epsilon(1e-5));
  CHECK(security::gap_factor(16.0) ==
        doctest::Approx(4.0 * security::gap_factor(1.0)).epsilon(1e-13));

  const ProtocolParams r0{8, 3, 0};
  CHECK(security::gap_from_formulas(r0, 1.0) ==
        doctest::Approx(std::exp2(6.25)).epsilon(1e-13));
  CHECK(security::gap_from_formulas(r0, 1.0) ==
        doctest::Approx(76.109).epsilon(1e-4));
  CHECK(security::gap_discrepancy_exponent(r0) ==
        doctest::Approx(2.5).epsilon(1e-14));

  // the two levels differ by the formula ratio, never the claimed gap
  const ProtocolParams p{10, 4, 1};
  const double ratio =
      security::security_level(p, 1.0, Variant::protocol_form) /
      security::security_level(p, 1.0, Variant::baseline_form);
  CHECK(ratio ==
        doctest::Approx(security::gap_from_formulas(p, 1.0)).epsilon(1e-12));
  CHECK(security::gap_factor(1.0) / security::gap_from_formulas(p, 1.0) ==
        doctest::Approx(std::exp2(security::gap_discrepancy_exponent(p)))
            .epsilon(1e-12));

  const auto flags = security::consistency_check(p, 1.0);
  bool has_gap_flag = false;
  for (const auto& f : flags)
    has_gap_flag = has_gap_flag || f.rfind("gap-mismatch", 0) == 0;
  CHECK(has_gap_flag);
}

TEST_CASE("agreement bound constant") {
  CHECK(security::agreement_bound_constant(8, 1, 0) ==
        doctest::Approx(std::exp2(3.5) * 0.5).epsilon(1e-13));
  CHECK(security::agreement_bound_constant(8, 1, 0) ==
        doctest::Approx(5.6569).epsilon(1e-4));
  CHECK(security::agreement_bound_constant(8, 40, 0) ==
        doctest::Approx(std::exp2(3.5)).epsilon(1e-10));
  // exact cancellation at k = n h(r/n): n = 2, r = 1 gives h = 1
  CHECK(security::agreement_bound_constant(2, 2, 1) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("overlap constant estimation") {
  const double constant = security::agreement_bound_constant(8, 3, 0);
  const std::vector<double> equal{constant, constant};
  CHECK(security::estimate_overlap_constant(equal, constant) ==
        doctest::Approx(1.0).epsilon(1e-13));
  const std::vector<double> doubled{2.0 * constant};
  CHECK(security::estimate_overlap_constant(doubled, constant) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(security::estimate_overlap_constant({}, constant),
                  ParameterError);
}

TEST_CASE("monotonicity of the levels") {
  for (auto variant : {Variant::protocol_form, Variant::baseline_form}) {
    double prev = 1e300;
    for (int k = 2; k <= 6; ++k) {
      const double level =
          security::security_level({16, k, 1}, 1.0, variant);
      CHECK(level < prev);
      prev = level;
    }
    double prev_r = 0.0;
    for (int r = 0; r <= 8; ++r) {
      const double level =
          security::security_level({16, 3, r}, 1.0, variant);
      CHECK(level >= prev_r);
      prev_r = level;
    }
  }
}

TEST_CASE("parameter sweep") {
  const std::vector<int> none;
  CHECK(security::parameter_sweep(none, none, none, 1.0).empty());

  const std::vector<int> ns{8, 12};
  const std::vector<int> ks{4, 5};
  const std::vector<int> rs{1};
  const auto rows = security::parameter_sweep(ns, ks, rs, 1.0);
  REQUIRE(rows.size() == 4);
  // lexicographic order and per-cell agreement
  int idx = 0;
  for (int n : ns)
    for (int k : ks)
      for (int r : rs) {
        const auto& row = rows[static_cast<std::size_t>(idx++)];
        CHECK(row.n == n);
        CHECK(row.k == k);
        CHECK(row.r == r);
        if (2 * k >= n) {
          CHECK(row.skipped);
          continue;
        }
        CHECK_FALSE(row.skipped);
        const auto cell = security::evaluate_cell({n, k, r}, 1.0);
        CHECK(row.report.level_protocol == cell.level_protocol);
        CHECK(row.report.level_baseline == cell.level_baseline);
        CHECK(row.report.diamond == cell.diamond);
      }

  // shape-invalid triples are emitted with the skip marker
  const std::vector<int> n4{4}, k2{2}, r0{0};
  const auto skipped = security::parameter_sweep(n4, k2, r0, 1.0);
  REQUIRE(skipped.size() == 1);
  CHECK(skipped.front().skipped);
}

TEST_CASE("entropy window annotation") {
  const auto cell_ok = security::evaluate_cell({10, 4, 0}, 1.0);
  CHECK(cell_ok.entropy_window_ok);
  const auto cell_bad = security::evaluate_cell({10, 4, 1}, 1.0);
  CHECK_FALSE(cell_bad.entropy_window_ok);  // 2*10*h(0.1) = 9.38 > 8
  bool flagged = false;
  for (const auto& f : cell_bad.flags)
    flagged = flagged || f.rfind("entropy-window", 0) == 0;
  CHECK(flagged);
}

TEST_CASE("alternative additive constant is reported") {
  const ProtocolParams p{12, 4, 1};
  const double alt = security::security_level_alt_const(p, 1.0);
  const double main = security::security_level(p, 1.0, Variant::protocol_form);
  CHECK(main / alt == doctest::Approx(std::exp2(3.5)).epsilon(1e-12));
}
