#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <set>

#include "rulediff/specification.hpp"
#include "support/test_logs.hpp"

using namespace rulediff;
using T = ConstraintTemplate;
using testsupport::make_log;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  return path;
}

}  // namespace

TEST_CASE("candidate enumeration covers every template instantiation once", "[spec]") {
  const auto rules = candidate_rules({"a", "b"});
  CHECK(rules.size() == 2 * 2 + 11 * 2 * 1);

  std::set<std::string> seen;
  for (const Rule& r : rules) {
    CHECK_NOTHROW(validate_rule(r));
    CHECK(seen.insert(to_string(r)).second);
  }

  // Deterministic order: template-major, parameters lexicographic within.
  CHECK(std::is_sorted(rules.begin(), rules.end(), rule_less));

  // Repeated or unsorted activity names change nothing.
  const auto again = candidate_rules({"b", "a", "b", "a"});
  REQUIRE(again.size() == rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) CHECK(again[i] == rules[i]);
}

TEST_CASE("candidate count grows as 2n plus 11n(n-1)", "[spec]") {
  CHECK(candidate_rules({"a"}).size() == 2);
  CHECK(candidate_rules({"a", "b", "c"}).size() == 3 * 2 + 11 * 3 * 2);
  CHECK(candidate_rules({}).empty());
}

TEST_CASE("discovery keeps rules meeting both thresholds inclusively", "[spec]") {
  // Response(a,b): confidence 3/4, support 3/8. Participation(a): 1.0.
  EventLog log = make_log({{"a", "b"}, {"a", "b"}, {"a", "b"}, {"a", "c"}});

  const auto find = [](const Specification& s, const Rule& r) -> const AnnotatedRule* {
    for (const auto& ar : s.rules)
      if (ar.rule == r) return &ar;
    return nullptr;
  };
  const Rule resp = make_binary(T::Response, "a", "b");

  Specification at_exact = discover(log, 0.375, 0.75, 1, "L");
  const AnnotatedRule* ar = find(at_exact, resp);
  REQUIRE(ar != nullptr);
  CHECK(ar->support == 0.375);
  CHECK(ar->confidence == 0.75);

  CHECK(find(discover(log, 0.376, 0.0, 1, "L"), resp) == nullptr);
  CHECK(find(discover(log, 0.0, 0.751, 1, "L"), resp) == nullptr);

  Specification defaults = discover(log, 0.5, 0.0, 1, "L");
  CHECK(find(defaults, make_unary(T::Participation, "a")) != nullptr);
  CHECK(find(defaults, resp) == nullptr);  // support 0.375 < 0.5
  CHECK(defaults.source_log == "L");
}

TEST_CASE("zero thresholds keep the full candidate set", "[spec]") {
  EventLog log = make_log({{"a", "b"}});
  Specification all = discover(log, 0.0, 0.0, 1, "L");
  CHECK(all.rules.size() == candidate_rules({"a", "b"}).size());
}

TEST_CASE("discovery is worker-count independent", "[spec]") {
  SplitMix64 g{5150};
  EventLog log = testsupport::random_log(g, 40, 8, 4);
  Specification one = discover(log, 0.3, 0.2, 1, "L");
  Specification many = discover(log, 0.3, 0.2, 7, "L");
  REQUIRE(one.rules.size() == many.rules.size());
  for (std::size_t i = 0; i < one.rules.size(); ++i) {
    CHECK(one.rules[i].rule == many.rules[i].rule);
    CHECK(one.rules[i].support == many.rules[i].support);
    CHECK(one.rules[i].confidence == many.rules[i].confidence);
  }
}

TEST_CASE("specifications survive a file round trip", "[spec]") {
  EventLog log = make_log({{"a", "b"}, {"b", "a"}, {"a", "c"}});
  Specification spec = discover(log, 0.1, 0.1, 1, "demo");
  REQUIRE_FALSE(spec.rules.empty());

  const auto path = std::filesystem::temp_directory_path() / "spec_roundtrip.json";
  write_specification(spec, path.string());
  Specification back = read_specification(path.string());

  CHECK(back.source_log == spec.source_log);
  REQUIRE(back.rules.size() == spec.rules.size());
  for (std::size_t i = 0; i < spec.rules.size(); ++i) {
    CHECK(back.rules[i].rule == spec.rules[i].rule);
    CHECK(back.rules[i].support == spec.rules[i].support);
    CHECK(back.rules[i].confidence == spec.rules[i].confidence);
  }
}

TEST_CASE("a typo in a template name lists the valid ones", "[spec]") {
  const auto path = write_temp("typo.json", R"({"constraints":[
    {"template":"Responze","parameters":["a","b"],"support":0.5,"confidence":0.5}]})");
  CHECK_THROWS_MATCHES(read_specification(path.string()), ParseError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("unknown template 'Responze'") &&
                           Catch::Matchers::ContainsSubstring("Response") &&
                           Catch::Matchers::ContainsSubstring("ChainSuccession")));
}

TEST_CASE("arity mismatches and bad parameters are rejected", "[spec]") {
  const auto unary_two = write_temp("unary_two.json", R"({"constraints":[
    {"template":"Participation","parameters":["a","b"],"support":1,"confidence":1}]})");
  CHECK_THROWS_MATCHES(read_specification(unary_two.string()), ParseError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("takes 1 parameter")));

  const auto same = write_temp("same_params.json", R"({"constraints":[
    {"template":"Response","parameters":["a","a"],"support":1,"confidence":1}]})");
  CHECK_THROWS_AS(read_specification(same.string()), ParseError);

  const auto out_of_range = write_temp("range.json", R"({"constraints":[
    {"template":"Response","parameters":["a","b"],"support":1.5,"confidence":1}]})");
  CHECK_THROWS_MATCHES(read_specification(out_of_range.string()), ParseError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("[0, 1]")));

  const auto no_constraints = write_temp("no_constraints.json", R"({"rules":[]})");
  CHECK_THROWS_MATCHES(read_specification(no_constraints.string()), ParseError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("constraints")));

  const auto not_json = write_temp("not_json.json", "{constraints: oops");
  CHECK_THROWS_AS(read_specification(not_json.string()), ParseError);
}
