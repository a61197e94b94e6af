#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rulediff/report.hpp"

using namespace rulediff;
using T = ConstraintTemplate;

namespace {

TestedRule tested(Rule rule, double ma, double mb, std::int64_t exceed = 4,
                  double p = 0.005) {
  TestedRule tr;
  tr.rule = std::move(rule);
  tr.measure_a = ma;
  tr.measure_b = mb;
  tr.diff = std::abs(ma - mb);
  tr.exceedances = exceed;
  tr.counter = exceed + 1;
  tr.p_value = p;
  tr.significant = true;
  return tr;
}

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("rulediff_report_" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("larger differences rank first", "[report]") {
  std::vector<TestedRule> rules = {
      tested(make_binary(T::Response, "a", "b"), 0.6, 0.3),
      tested(make_unary(T::Participation, "a"), 1.0, 0.2),
      tested(make_binary(T::Precedence, "a", "b"), 0.5, 0.0),
  };
  const auto ranked = rank(rules);
  CHECK(ranked[0].diff == 0.8);
  CHECK(ranked[1].diff == 0.5);
  CHECK(ranked[2].diff == 0.3);
}

TEST_CASE("equal differences are broken by the stronger measure", "[report]") {
  std::vector<TestedRule> rules = {
      tested(make_binary(T::Response, "a", "b"), 0.8, 0.4),
      tested(make_binary(T::Response, "c", "d"), 1.0, 0.6),
      tested(make_binary(T::Response, "e", "f"), 0.5, 0.9),
  };
  const auto ranked = rank(rules);
  CHECK(ranked[0].rule.activator == "c");
  CHECK(ranked[1].rule.activator == "e");  // max(0.5, 0.9) beats max(0.8, 0.4)
  CHECK(ranked[2].rule.activator == "a");
}

TEST_CASE("fully tied rules fall back to rule identity", "[report]") {
  std::vector<TestedRule> rules = {
      tested(make_binary(T::Response, "b", "a"), 0.9, 0.5),
      tested(make_binary(T::Response, "a", "c"), 0.9, 0.5),
      tested(make_binary(T::Response, "a", "b"), 0.9, 0.5),
      tested(make_binary(T::CoExistence, "a", "b"), 0.9, 0.5),
      tested(make_unary(T::Participation, "a"), 0.9, 0.5),
  };
  const auto ranked = rank(rules);
  CHECK(ranked[0].rule.tpl == T::CoExistence);
  CHECK(ranked[1].rule.tpl == T::Participation);
  CHECK(ranked[2].rule.tpl == T::Response);
  CHECK(ranked[2].rule.activator == "a");
  CHECK(ranked[2].rule.target == "b");
  CHECK(ranked[3].rule.target == "c");
  CHECK(ranked[4].rule.activator == "b");
  CHECK(rank({}).empty());
}

TEST_CASE("statements name the stronger variant and the gap", "[report]") {
  CHECK(render_nl(tested(make_unary(T::Participation, "Admission NC"), 0.965, 0.591)) ==
        "In Variant A, it is 37.4% more likely than in Variant B that "
        "Admission NC occurs in a process instance.");
  CHECK(render_nl(tested(make_binary(T::Response, "a", "b"), 0.2, 0.7)) ==
        "In Variant B, it is 50.0% more likely than in Variant A that "
        "if a occurs, b will occur afterwards.");
}

TEST_CASE("a measure of zero turns the statement into an only-in claim", "[report]") {
  CHECK(render_nl(tested(make_unary(T::AtMostOne, "01_HOOFD_456"), 0.42, 0.0)) ==
        "It happens only in Variant A that 01_HOOFD_456 may occur at most once "
        "in a process instance.");
  CHECK(render_nl(tested(make_binary(T::ChainResponse, "a", "b"), 0.0, 0.4)) ==
        "It happens only in Variant B that if a occurs, b will occur "
        "immediately afterwards.");
  // Ties go to A, and only an exact zero triggers the only-in wording.
  CHECK(render_nl(tested(make_unary(T::Participation, "a"), 0.5, 0.5)).find("Variant A") !=
        std::string::npos);
  CHECK(render_nl(tested(make_unary(T::Participation, "a"), 0.5, 0.001)) ==
        "In Variant A, it is 49.9% more likely than in Variant B that "
        "a occurs in a process instance.");
}

TEST_CASE("percentages round half away from zero at one decimal", "[report]") {
  TestedRule tr = tested(make_unary(T::Participation, "a"), 0.8125, 0.5);
  tr.diff = 0.3125;  // exactly representable; 312.5 per mille rounds up
  CHECK(render_nl(tr).find("31.3%") != std::string::npos);
  tr.diff = 0.0625;
  CHECK(render_nl(tr).find("6.3%") != std::string::npos);
  tr.diff = 0.5;
  CHECK(render_nl(tr).find("50.0%") != std::string::npos);
}

TEST_CASE("every template has its own phrasing", "[report]") {
  const struct {
    Rule rule;
    std::string phrase;
  } cases[] = {
      {make_unary(T::Participation, "a"), "a occurs in a process instance"},
      {make_unary(T::AtMostOne, "a"), "a may occur at most once in a process instance"},
      {make_binary(T::RespondedExistence, "a", "b"), "if a occurs, also b occurs"},
      {make_binary(T::Response, "a", "b"), "if a occurs, b will occur afterwards"},
      {make_binary(T::AlternateResponse, "a", "b"),
       "if a occurs, b will occur afterwards without any other occurrence of a in between"},
      {make_binary(T::ChainResponse, "a", "b"),
       "if a occurs, b will occur immediately afterwards"},
      {make_binary(T::Precedence, "a", "b"), "b occurs only if preceded by a"},
      {make_binary(T::AlternatePrecedence, "a", "b"),
       "each time b occurs, it is preceded by a and no other b recurs in between"},
      {make_binary(T::ChainPrecedence, "a", "b"),
       "each time b occurs, a occurs immediately beforehand"},
      {make_binary(T::CoExistence, "a", "b"),
       "if b occurs, a occurs as well, and vice versa"},
      {make_binary(T::Succession, "a", "b"), "a occurs if and only if it is followed by b"},
      {make_binary(T::AlternateSuccession, "a", "b"),
       "a and b occur if and only if the latter follows the former, and they "
       "alternate each other"},
      {make_binary(T::ChainSuccession, "a", "b"),
       "a and b occur if and only if the latter immediately follows the former"},
  };
  for (const auto& c : cases) {
    INFO(to_string(c.rule));
    CHECK(render_nl(tested(c.rule, 0.75, 0.5)) ==
          "In Variant A, it is 25.0% more likely than in Variant B that " + c.phrase + ".");
  }
}

TEST_CASE("the text file holds the top statements and the csv holds all", "[report]") {
  std::vector<TestedRule> ranked = rank({
      tested(make_binary(T::AlternateResponse, "Create Fine", "Add penalty"), 1.0, 0.2),
      tested(make_unary(T::Participation, "a"), 0.9, 0.4, 0, 0.001),
      tested(make_binary(T::Response, "say \"hi\"", "b"), 0.5, 0.25, 123, 0.124),
  });
  const auto dir = fresh_dir("topn");
  const OutputPaths paths = write_outputs(ranked, dir, 2);
  CHECK(paths.text == dir / "differences.txt");
  CHECK(paths.csv == dir / "differences.csv");

  const auto text_lines = lines_of(slurp(paths.text));
  REQUIRE(text_lines.size() == 2);
  CHECK(text_lines[0] ==
        "In Variant A, it is 80.0% more likely than in Variant B that "
        "if Create Fine occurs, Add penalty will occur afterwards without any "
        "other occurrence of Create Fine in between.");
  CHECK(text_lines[1] ==
        "In Variant A, it is 50.0% more likely than in Variant B that "
        "a occurs in a process instance.");

  const auto csv_lines = lines_of(slurp(paths.csv));
  REQUIRE(csv_lines.size() == 4);
  CHECK(csv_lines[0] ==
        "\"rank\",\"template\",\"activator\",\"target\",\"measure_A\",\"measure_B\","
        "\"abs_diff\",\"exceedance_count\",\"p_value\",\"statement\"");
  CHECK(csv_lines[1] ==
        "\"1\",\"AlternateResponse\",\"Create Fine\",\"Add penalty\",\"1.000\",\"0.200\","
        "\"0.800\",\"4\",\"0.005000\",\"In Variant A, it is 80.0% more likely than in "
        "Variant B that if Create Fine occurs, Add penalty will occur afterwards without "
        "any other occurrence of Create Fine in between.\"");
  CHECK(csv_lines[2] ==
        "\"2\",\"Participation\",\"a\",\"\",\"0.900\",\"0.400\",\"0.500\",\"0\","
        "\"0.001000\",\"In Variant A, it is 50.0% more likely than in Variant B that "
        "a occurs in a process instance.\"");
  // Embedded quotes are doubled, in the activator and in the statement.
  CHECK(csv_lines[3] ==
        "\"3\",\"Response\",\"say \"\"hi\"\"\",\"b\",\"0.500\",\"0.250\",\"0.250\","
        "\"123\",\"0.124000\",\"In Variant A, it is 25.0% more likely than in Variant B "
        "that if say \"\"hi\"\" occurs, b will occur afterwards.\"");
  std::filesystem::remove_all(dir);
}

TEST_CASE("a generous top-n just writes everything", "[report]") {
  const std::vector<TestedRule> ranked = {tested(make_unary(T::Participation, "a"), 0.9, 0.1)};
  const auto dir = fresh_dir("overflow");
  const OutputPaths paths = write_outputs(ranked, dir, 50);
  CHECK(lines_of(slurp(paths.text)).size() == 1);
  CHECK(lines_of(slurp(paths.csv)).size() == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("no significant rules still produces both files", "[report]") {
  const auto dir = fresh_dir("empty");
  const OutputPaths paths = write_outputs({}, dir, 10);
  CHECK(slurp(paths.text).empty());
  const auto csv_lines = lines_of(slurp(paths.csv));
  REQUIRE(csv_lines.size() == 1);
  CHECK(csv_lines[0].find("\"rank\"") == 0);
  std::filesystem::remove_all(dir);
}
