#include <catch2/catch_amalgamated.hpp>
#include <algorithm>

#include "rulediff/analysis.hpp"
#include "support/test_logs.hpp"

using namespace rulediff;
using T = ConstraintTemplate;
using testsupport::make_log;

namespace {

MeasuredRule mr(T t, const char* x, const char* y, double a, double b) {
  Rule r = arity(t) == 1 ? make_unary(t, x) : make_binary(t, x, y);
  return MeasuredRule{r, a, b, std::abs(a - b)};
}

bool contains(const std::vector<MeasuredRule>& rules, const Rule& r) {
  return std::any_of(rules.begin(), rules.end(),
                     [&](const MeasuredRule& m) { return m.rule == r; });
}

// The nine-rule family over (t, v) whose measures tie along every entailment
// edge: one side at 0.82/0.49, the precedence side at 1.00/1.00.
std::vector<MeasuredRule> tied_family() {
  return {
      mr(T::AlternateSuccession, "t", "v", 0.82, 0.49),
      mr(T::AlternateResponse, "t", "v", 0.82, 0.49),
      mr(T::AlternatePrecedence, "t", "v", 1.00, 1.00),
      mr(T::Succession, "t", "v", 0.82, 0.49),
      mr(T::Response, "t", "v", 0.82, 0.49),
      mr(T::Precedence, "t", "v", 1.00, 1.00),
      mr(T::CoExistence, "t", "v", 0.82, 0.49),
      mr(T::RespondedExistence, "t", "v", 0.82, 0.49),
      mr(T::RespondedExistence, "v", "t", 1.00, 1.00),
  };
}

}  // namespace

TEST_CASE("aggregate measures the union of both rule sets on both logs", "[analysis]") {
  EventLog log_a = make_log({{"a", "b"}, {"a", "b"}});
  EventLog log_b = make_log({{"a"}, {"a", "b"}});

  Specification spec_a;
  spec_a.rules.push_back({make_binary(T::Response, "a", "b"), 0, 0});
  spec_a.rules.push_back({make_unary(T::Participation, "a"), 0, 0});
  Specification spec_b;
  spec_b.rules.push_back({make_binary(T::Response, "a", "b"), 0, 0});
  spec_b.rules.push_back({make_unary(T::Participation, "b"), 0, 0});

  AggregateResult agg = aggregate(spec_a, spec_b, log_a, log_b, MeasureKind::Confidence);
  REQUIRE(agg.rules.size() == 3);  // union removes the shared Response rule once
  CHECK(std::is_sorted(agg.rules.begin(), agg.rules.end(),
                       [](const MeasuredRule& x, const MeasuredRule& y) {
                         return rule_less(x.rule, y.rule);
                       }));

  for (const auto& m : agg.rules) {
    CHECK(m.measure_a == log_confidence(m.rule, log_a));
    CHECK(m.measure_b == log_confidence(m.rule, log_b));
    CHECK(m.diff == std::abs(m.measure_a - m.measure_b));
  }
  CHECK(agg.warnings.empty());
}

TEST_CASE("disjoint alphabets earn a warning", "[analysis]") {
  EventLog log_a = make_log({{"a"}});
  EventLog log_b = make_log({{"z"}});
  Specification sa, sb;
  sa.rules.push_back({make_unary(T::Participation, "a"), 0, 0});
  AggregateResult agg = aggregate(sa, sb, log_a, log_b, MeasureKind::Confidence);
  REQUIRE(agg.warnings.size() == 1);
  CHECK(agg.warnings[0].find("no activity in common") != std::string::npos);
}

TEST_CASE("threshold pruning tallies the difference gate first", "[analysis]") {
  std::vector<MeasuredRule> rules = {
      mr(T::Response, "a", "b", 0.98, 0.99),   // diff 0.01 at the gate: kept
      mr(T::Response, "a", "c", 0.98, 0.985),  // diff below: pruned
      mr(T::Response, "b", "a", 0.10, 0.12),   // low everywhere, diff ok with m_min 0
      mr(T::Response, "b", "c", 0.40, 0.10),   // below m_min 0.5 in both: pruned second
      mr(T::Response, "c", "a", 0.70, 0.10),   // above m_min in one variant: kept
  };

  SECTION("defaults keep any rule clearing the difference gate") {
    PruneCounts counts = prune_thresholds(rules, 0.0, 0.01);
    CHECK(counts.below_diff == 1);
    CHECK(counts.below_measure == 0);
    CHECK(rules.size() == 4);
  }

  SECTION("m_min removes rules weak in both variants") {
    PruneCounts counts = prune_thresholds(rules, 0.5, 0.01);
    CHECK(counts.below_diff == 1);
    CHECK(counts.below_measure == 2);
    REQUIRE(rules.size() == 2);
    CHECK(contains(rules, make_binary(T::Response, "a", "b")));
    CHECK(contains(rules, make_binary(T::Response, "c", "a")));
  }

  SECTION("a rule below both gates counts toward the difference gate") {
    std::vector<MeasuredRule> both = {mr(T::Response, "a", "b", 0.10, 0.10)};
    PruneCounts counts = prune_thresholds(both, 0.5, 0.01);
    CHECK(counts.below_diff == 1);
    CHECK(counts.below_measure == 0);
    CHECK(both.empty());
  }
}

TEST_CASE("simplification keeps only the most generic equally-measured rules", "[analysis]") {
  auto rules = tied_family();
  const std::size_t removed = hierarchical_simplification(rules);
  CHECK(removed == 7);
  REQUIRE(rules.size() == 2);
  CHECK(contains(rules, make_binary(T::RespondedExistence, "t", "v")));
  CHECK(contains(rules, make_binary(T::RespondedExistence, "v", "t")));
}

TEST_CASE("difference pruning then simplification leaves one survivor", "[analysis]") {
  auto rules = tied_family();
  PruneCounts counts = prune_thresholds(rules, 0.0, 0.01);
  CHECK(counts.below_diff == 3);  // the 1.00/1.00 rules show no difference
  CHECK(rules.size() == 6);

  hierarchical_simplification(rules);
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].rule == make_binary(T::RespondedExistence, "t", "v"));
  CHECK(rules[0].measure_a == 0.82);
  CHECK(rules[0].measure_b == 0.49);
}

TEST_CASE("rules differing in both variants both survive simplification", "[analysis]") {
  std::vector<MeasuredRule> rules = {
      mr(T::Response, "a", "b", 0.80, 0.40),
      mr(T::RespondedExistence, "a", "b", 0.90, 0.50),
  };
  CHECK(hierarchical_simplification(rules) == 0);
  CHECK(rules.size() == 2);
}

TEST_CASE("a tie in just one variant is enough to drop the stricter rule", "[analysis]") {
  std::vector<MeasuredRule> rules = {
      mr(T::Response, "a", "b", 0.80, 0.40),
      mr(T::RespondedExistence, "a", "b", 0.80, 0.50),
  };
  CHECK(hierarchical_simplification(rules) == 1);
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].rule == make_binary(T::RespondedExistence, "a", "b"));
}

TEST_CASE("simplification witnesses come from the original set", "[analysis]") {
  // The middle rule ties its parent, the bottom ties the middle but not the
  // top: with witnesses fixed to the input set, both lower rules go.
  std::vector<MeasuredRule> rules = {
      mr(T::ChainResponse, "a", "b", 0.30, 0.20),
      mr(T::AlternateResponse, "a", "b", 0.30, 0.40),
      mr(T::RespondedExistence, "a", "b", 0.50, 0.40),
  };
  CHECK(hierarchical_simplification(rules) == 2);
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].rule == make_binary(T::RespondedExistence, "a", "b"));
}

TEST_CASE("incomparable rules are never simplified away", "[analysis]") {
  std::vector<MeasuredRule> rules = {
      mr(T::Response, "a", "b", 0.5, 0.5),
      mr(T::Precedence, "a", "b", 0.5, 0.5),
      mr(T::Participation, "a", nullptr, 0.5, 0.5),
  };
  CHECK(hierarchical_simplification(rules) == 0);
  CHECK(rules.size() == 3);
}
