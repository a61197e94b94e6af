#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rulediff/analysis.hpp"
#include "rulediff/encoding.hpp"
#include "rulediff/errors.hpp"
#include "rulediff/permutation.hpp"
#include "rulediff/specification.hpp"

namespace rulediff {

struct AnalysisParams {
  MeasureKind measure = MeasureKind::Confidence;
  double m_min = 0.00;
  double m_diff_min = 0.01;
  std::int64_t permutations = 1000;
  double alpha = 0.01;
  int top_n = 10;
  double discovery_support = 0.5;
  double discovery_confidence = 0.0;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: use available parallelism

  void validate() const {
    if (m_min < 0.0 || m_min > 1.0) throw ConfigError("m_min must be within [0, 1]");
    if (m_diff_min < 0.0 || m_diff_min > 1.0)
      throw ConfigError("m_diff_min must be within [0, 1]");
    if (permutations < 1) throw ConfigError("permutations must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be within (0, 1)");
    if (top_n < 1) throw ConfigError("top-n must be at least 1");
    if (discovery_support < 0.0 || discovery_support > 1.0)
      throw ConfigError("discovery support threshold must be within [0, 1]");
    if (discovery_confidence < 0.0 || discovery_confidence > 1.0)
      throw ConfigError("discovery confidence threshold must be within [0, 1]");
    if (workers < 0) throw ConfigError("workers must be non-negative");
  }
};

// A rule that survived testing, with everything the report needs.
struct TestedRule {
  Rule rule;
  double measure_a = 0.0;
  double measure_b = 0.0;
  double diff = 0.0;
  std::int64_t exceedances = 0;
  std::int64_t counter = 0;
  double p_value = 1.0;
  bool significant = false;
};

struct PhaseTimings {
  double discovery_s = 0.0;
  double aggregate_s = 0.0;
  double preprocess_s = 0.0;
  double encode_s = 0.0;
  double test_s = 0.0;
};

struct AnalysisOutcome {
  std::size_t rules_a = 0;
  std::size_t rules_b = 0;
  std::size_t union_size = 0;
  PruneCounts pruned;
  std::size_t simplified_away = 0;
  std::vector<TestedRule> tested;       // rules that entered the permutation test
  std::vector<TestedRule> significant;  // subset with p_value <= alpha
  bool discovery_ran = false;
  bool degenerate = false;  // no rules survived pre-processing
  std::vector<std::string> warnings;
  PhaseTimings timings;
  MeasureKind measure = MeasureKind::Confidence;
  std::int64_t permutations = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

class PhaseClock {
public:
  PhaseClock() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// The full four-phase pipeline: discover (unless models are supplied),
// measure and pre-process, permutation-test, collect significant rules.
inline AnalysisOutcome analyze(const EventLog& log_a, const EventLog& log_b,
                               const AnalysisParams& params,
                               std::optional<Specification> model_a = std::nullopt,
                               std::optional<Specification> model_b = std::nullopt) {
  params.validate();
  if (log_a.empty()) throw DegenerateError("variant A log contains no traces");
  if (log_b.empty()) throw DegenerateError("variant B log contains no traces");

  AnalysisOutcome out;
  out.measure = params.measure;
  out.permutations = params.permutations;
  out.alpha = params.alpha;
  out.seed = params.seed;

  detail::PhaseClock clock;
  out.discovery_ran = !model_a.has_value() || !model_b.has_value();
  const Specification spec_a =
      model_a.has_value() ? std::move(*model_a)
                          : discover(log_a, params.discovery_support, params.discovery_confidence,
                                     params.workers, "variant A");
  const Specification spec_b =
      model_b.has_value() ? std::move(*model_b)
                          : discover(log_b, params.discovery_support, params.discovery_confidence,
                                     params.workers, "variant B");
  out.rules_a = spec_a.rules.size();
  out.rules_b = spec_b.rules.size();
  out.timings.discovery_s = clock.lap();

  AggregateResult agg =
      aggregate(spec_a, spec_b, log_a, log_b, params.measure, params.workers);
  out.union_size = agg.rules.size();
  out.warnings = std::move(agg.warnings);
  out.timings.aggregate_s = clock.lap();

  out.pruned = prune_thresholds(agg.rules, params.m_min, params.m_diff_min);
  out.simplified_away = hierarchical_simplification(agg.rules);
  out.timings.preprocess_s = clock.lap();

  if (agg.rules.empty()) {
    out.degenerate = true;
    out.warnings.push_back(
        "no rules left to test after pre-processing; the variants show no "
        "difference at the configured thresholds");
    return out;
  }

  const EncodedPair enc = encode_logs(log_a, log_b, agg.rules, params.workers);
  out.timings.encode_s = clock.lap();

  const PermutationOutcome perm = permutation_test(
      enc.a, enc.b, agg.rules, params.measure, params.permutations, params.seed, params.workers);
  out.timings.test_s = clock.lap();

  out.tested.reserve(agg.rules.size());
  for (std::size_t i = 0; i < agg.rules.size(); ++i) {
    TestedRule tr;
    tr.rule = agg.rules[i].rule;
    tr.measure_a = agg.rules[i].measure_a;
    tr.measure_b = agg.rules[i].measure_b;
    tr.diff = agg.rules[i].diff;
    tr.exceedances = perm.exceedances[i];
    tr.counter = perm.counter(i);
    tr.p_value = perm.p_value(i);
    tr.significant = tr.p_value <= params.alpha;
    out.tested.push_back(tr);
    if (tr.significant) out.significant.push_back(std::move(tr));
  }
  return out;
}

}  // namespace rulediff
