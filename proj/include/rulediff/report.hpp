#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rulediff/declare.hpp"
#include "rulediff/errors.hpp"
#include "rulediff/pipeline.hpp"

namespace rulediff {

// Largest differences first; equally large differences are broken by the
// stronger measure, then by rule identity so the order is total.
inline std::vector<TestedRule> rank(std::vector<TestedRule> rules) {
  std::stable_sort(rules.begin(), rules.end(), [](const TestedRule& x, const TestedRule& y) {
    if (x.diff != y.diff) return x.diff > y.diff;
    const double mx = std::max(x.measure_a, x.measure_b);
    const double my = std::max(y.measure_a, y.measure_b);
    if (mx != my) return mx > my;
    const int tn = std::string_view(template_name(x.rule.tpl))
                       .compare(template_name(y.rule.tpl));
    if (tn != 0) return tn < 0;
    if (x.rule.activator != y.rule.activator) return x.rule.activator < y.rule.activator;
    return x.rule.target < y.rule.target;
  });
  return rules;
}

namespace detail {

// What the rule asserts, phrased for the end of "... that <phrase>."
inline std::string rule_phrase(const Rule& r) {
  const std::string& a = r.activator;
  const std::string& b = r.target;
  switch (r.tpl) {
    case ConstraintTemplate::Participation:
      return a + " occurs in a process instance";
    case ConstraintTemplate::AtMostOne:
      return a + " may occur at most once in a process instance";
    case ConstraintTemplate::RespondedExistence:
      return "if " + a + " occurs, also " + b + " occurs";
    case ConstraintTemplate::Response:
      return "if " + a + " occurs, " + b + " will occur afterwards";
    case ConstraintTemplate::AlternateResponse:
      return "if " + a + " occurs, " + b + " will occur afterwards without any other occurrence of " +
             a + " in between";
    case ConstraintTemplate::ChainResponse:
      return "if " + a + " occurs, " + b + " will occur immediately afterwards";
    case ConstraintTemplate::Precedence:
      return b + " occurs only if preceded by " + a;
    case ConstraintTemplate::AlternatePrecedence:
      return "each time " + b + " occurs, it is preceded by " + a +
             " and no other " + b + " recurs in between";
    case ConstraintTemplate::ChainPrecedence:
      return "each time " + b + " occurs, " + a + " occurs immediately beforehand";
    case ConstraintTemplate::CoExistence:
      return "if " + b + " occurs, " + a + " occurs as well, and vice versa";
    case ConstraintTemplate::Succession:
      return a + " occurs if and only if it is followed by " + b;
    case ConstraintTemplate::AlternateSuccession:
      return a + " and " + b + " occur if and only if the latter follows the former, and they alternate each other";
    case ConstraintTemplate::ChainSuccession:
      return a + " and " + b + " occur if and only if the latter immediately follows the former";
  }
  return to_string(r);
}

inline std::string format_percent(double diff) {
  const double rounded = std::round(diff * 1000.0) / 10.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", rounded);
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

// One sentence per difference. A rule holding in only one variant is called
// out as such; otherwise the variant with the stronger measure leads and the
// difference is given as a percentage (one decimal).
inline std::string render_nl(const TestedRule& tr) {
  const bool a_stronger = tr.measure_a >= tr.measure_b;
  const char* strong = a_stronger ? "A" : "B";
  const char* weak = a_stronger ? "B" : "A";
  const std::string phrase = detail::rule_phrase(tr.rule);
  if (std::min(tr.measure_a, tr.measure_b) == 0.0)
    return std::string("It happens only in Variant ") + strong + " that " + phrase + ".";
  return std::string("In Variant ") + strong + ", it is " + detail::format_percent(tr.diff) +
         "% more likely than in Variant " + weak + " that " + phrase + ".";
}

struct OutputPaths {
  std::filesystem::path text;
  std::filesystem::path csv;
};

namespace detail {

inline void write_csv_quoted(std::ostream& out, std::string_view field) {
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace detail

// Writes the two report files: the top-N statements as plain text (one per
// line, already ranked) and every significant rule as CSV. Measures are
// printed with three decimals, p-values with six.
inline OutputPaths write_outputs(const std::vector<TestedRule>& ranked,
                                 const std::filesystem::path& out_dir, int top_n) {
  std::filesystem::create_directories(out_dir);
  OutputPaths paths{out_dir / "differences.txt", out_dir / "differences.csv"};

  {
    std::ofstream text(paths.text, std::ios::binary);
    if (!text) throw ParseError("cannot open '" + paths.text.string() + "' for writing");
    const std::size_t n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(top_n));
    for (std::size_t i = 0; i < n; ++i) text << render_nl(ranked[i]) << '\n';
    if (!text) throw ParseError("error while writing '" + paths.text.string() + "'");
  }

  {
    std::ofstream csv(paths.csv, std::ios::binary);
    if (!csv) throw ParseError("cannot open '" + paths.csv.string() + "' for writing");
    csv << "\"rank\",\"template\",\"activator\",\"target\",\"measure_A\",\"measure_B\","
           "\"abs_diff\",\"exceedance_count\",\"p_value\",\"statement\"\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const TestedRule& tr = ranked[i];
      csv << '"' << (i + 1) << "\",";
      detail::write_csv_quoted(csv, template_name(tr.rule.tpl));
      csv << ',';
      detail::write_csv_quoted(csv, tr.rule.activator);
      csv << ',';
      detail::write_csv_quoted(csv, tr.rule.target);
      csv << ",\"" << detail::format_fixed(tr.measure_a, 3) << "\",\""
          << detail::format_fixed(tr.measure_b, 3) << "\",\""
          << detail::format_fixed(tr.diff, 3) << "\",\"" << tr.exceedances << "\",\""
          << detail::format_fixed(tr.p_value, 6) << "\",";
      detail::write_csv_quoted(csv, render_nl(tr));
      csv << '\n';
    }
    if (!csv) throw ParseError("error while writing '" + paths.csv.string() + "'");
  }
  return paths;
}

}  // namespace rulediff
