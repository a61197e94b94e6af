#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rulediff/declare.hpp"
#include "rulediff/errors.hpp"
#include "rulediff/event_log.hpp"
#include "rulediff/io_util.hpp"

namespace rulediff {

struct AnnotatedRule {
  Rule rule;
  double support = 0.0;
  double confidence = 0.0;
};

// A set of rules that hold on one log, each annotated with the measures it
// was discovered with.
struct Specification {
  std::string source_log;
  std::vector<AnnotatedRule> rules;
};

// Every rule instantiable over the given activities: both unary templates
// per activity, all eleven binary templates per ordered pair of distinct
// activities. |result| = 2n + 11n(n-1). Order is deterministic (template,
// then activities lexicographically).
inline std::vector<Rule> candidate_rules(std::vector<std::string> activities) {
  std::sort(activities.begin(), activities.end());
  activities.erase(std::unique(activities.begin(), activities.end()), activities.end());
  std::vector<Rule> out;
  const std::size_t n = activities.size();
  out.reserve(2 * n + 11 * n * (n > 0 ? n - 1 : 0));
  for (ConstraintTemplate t : all_templates()) {
    if (arity(t) == 1) {
      for (const auto& a : activities) out.push_back(make_unary(t, a));
    } else {
      for (const auto& a : activities)
        for (const auto& b : activities)
          if (a != b) out.push_back(make_binary(t, a, b));
    }
  }
  return out;
}

namespace detail {

inline unsigned resolve_workers(int workers) {
  if (workers > 0) return static_cast<unsigned>(workers);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(begin, end) over [0, n) split into contiguous chunks, one worker
// thread per chunk. Results must be written to disjoint slots.
template <typename Fn>
void parallel_chunks(std::size_t n, int workers, Fn&& fn) {
  const unsigned w = std::min<std::size_t>(resolve_workers(workers), n == 0 ? 1 : n);
  if (w <= 1 || n == 0) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  const std::size_t chunk = (n + w - 1) / w;
  for (unsigned i = 0; i < w; ++i) {
    const std::size_t lo = i * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, i, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Measures every candidate rule over the log's alphabet and keeps those
// meeting both thresholds (inclusive).
inline Specification discover(const EventLog& log, double support_min, double confidence_min,
                              int workers = 0, std::string source_log = {}) {
  const std::vector<Rule> candidates = candidate_rules(log.alphabet().names());
  const std::int64_t total_events = log.total_events();
  const std::int64_t total_traces = log.total_traces();

  std::vector<AnnotatedRule> measured(candidates.size());
  detail::parallel_chunks(candidates.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Rule& r = candidates[i];
      const DirectionalSums sums = log_sums(compile_rule(r, log.alphabet()), log);
      measured[i] = AnnotatedRule{
          r,
          measure_from_sums(MeasureKind::Support, r.tpl, sums, total_events, total_traces),
          measure_from_sums(MeasureKind::Confidence, r.tpl, sums, total_events, total_traces)};
    }
  });

  Specification spec;
  spec.source_log = std::move(source_log);
  for (auto& ar : measured)
    if (ar.support >= support_min && ar.confidence >= confidence_min)
      spec.rules.push_back(std::move(ar));
  return spec;
}

namespace detail {

inline std::string valid_template_names() {
  std::string s;
  for (ConstraintTemplate t : all_templates()) {
    if (!s.empty()) s += ", ";
    s += template_name(t);
  }
  return s;
}

}  // namespace detail

inline nlohmann::json specification_to_json(const Specification& spec) {
  nlohmann::json j;
  j["source_log"] = spec.source_log;
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& ar : spec.rules) {
    nlohmann::json c;
    c["template"] = template_name(ar.rule.tpl);
    c["parameters"] = arity(ar.rule.tpl) == 1
                          ? nlohmann::json::array({ar.rule.activator})
                          : nlohmann::json::array({ar.rule.activator, ar.rule.target});
    c["support"] = ar.support;
    c["confidence"] = ar.confidence;
    constraints.push_back(std::move(c));
  }
  j["constraints"] = std::move(constraints);
  return j;
}

inline Specification specification_from_json(const nlohmann::json& j, const std::string& origin) {
  const auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("invalid specification '" + origin + "': " + what);
  };
  if (!j.is_object() || !j.contains("constraints") || !j["constraints"].is_array())
    throw fail("expected a top-level object with a 'constraints' array");

  Specification spec;
  if (j.contains("source_log") && j["source_log"].is_string())
    spec.source_log = j["source_log"].get<std::string>();

  std::size_t idx = 0;
  for (const auto& c : j["constraints"]) {
    const std::string where = "constraint " + std::to_string(idx);
    if (!c.is_object()) throw fail(where + " is not an object");
    if (!c.contains("template") || !c["template"].is_string())
      throw fail(where + " is missing a 'template' string");
    const std::string tname = c["template"].get<std::string>();
    const auto tpl = parse_template(tname);
    if (!tpl)
      throw fail(where + ": unknown template '" + tname +
                 "' (valid: " + detail::valid_template_names() + ")");
    if (!c.contains("parameters") || !c["parameters"].is_array())
      throw fail(where + " is missing a 'parameters' array");
    const auto& params = c["parameters"];
    const int want = arity(*tpl);
    if (static_cast<int>(params.size()) != want)
      throw fail(where + ": " + tname + " takes " + std::to_string(want) + " parameter" +
                 (want == 1 ? "" : "s") + ", got " + std::to_string(params.size()));
    for (const auto& p : params)
      if (!p.is_string() || p.get<std::string>().empty())
        throw fail(where + ": parameters must be non-empty strings");

    AnnotatedRule ar;
    ar.rule.tpl = *tpl;
    ar.rule.activator = params[0].get<std::string>();
    if (want == 2) ar.rule.target = params[1].get<std::string>();
    try {
      validate_rule(ar.rule);
    } catch (const ConfigError& e) {
      throw fail(where + ": " + e.what());
    }
    for (const char* key : {"support", "confidence"}) {
      if (!c.contains(key) || !c[key].is_number())
        throw fail(where + " is missing a numeric '" + std::string(key) + "'");
      const double v = c[key].get<double>();
      if (v < 0.0 || v > 1.0)
        throw fail(where + ": '" + std::string(key) + "' must be within [0, 1]");
    }
    ar.support = c["support"].get<double>();
    ar.confidence = c["confidence"].get<double>();
    spec.rules.push_back(std::move(ar));
    ++idx;
  }
  return spec;
}

inline void write_specification(const Specification& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << specification_to_json(spec).dump(2) << '\n';
  if (!out) throw ParseError("error while writing '" + path + "'");
}

inline Specification read_specification(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  return specification_from_json(j, path);
}

}  // namespace rulediff
