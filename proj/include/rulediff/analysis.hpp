#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rulediff/declare.hpp"
#include "rulediff/event_log.hpp"
#include "rulediff/specification.hpp"

namespace rulediff {

// One rule measured on both variants.
struct MeasuredRule {
  Rule rule;
  double measure_a = 0.0;
  double measure_b = 0.0;
  double diff = 0.0;  // |measure_a - measure_b|
};

struct AggregateResult {
  std::vector<MeasuredRule> rules;
  std::vector<std::string> warnings;
};

// Union of both specifications' rules, each measured on both logs with the
// chosen measure. Rules are ordered deterministically (template, activator,
// target).
inline AggregateResult aggregate(const Specification& spec_a, const Specification& spec_b,
                                 const EventLog& log_a, const EventLog& log_b, MeasureKind m,
                                 int workers = 0) {
  AggregateResult out;

  std::vector<Rule> rules;
  rules.reserve(spec_a.rules.size() + spec_b.rules.size());
  for (const auto& ar : spec_a.rules) rules.push_back(ar.rule);
  for (const auto& ar : spec_b.rules) rules.push_back(ar.rule);
  std::sort(rules.begin(), rules.end(), rule_less);
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());

  bool any_shared = false;
  for (const auto& name : log_a.alphabet().names())
    if (log_b.alphabet().find(name) != kNoActivity) {
      any_shared = true;
      break;
    }
  if (!any_shared && log_a.alphabet().size() > 0 && log_b.alphabet().size() > 0)
    out.warnings.push_back(
        "the two logs have no activity in common; every difference will be trivial");

  const std::int64_t events_a = log_a.total_events();
  const std::int64_t traces_a = log_a.total_traces();
  const std::int64_t events_b = log_b.total_events();
  const std::int64_t traces_b = log_b.total_traces();

  out.rules.resize(rules.size());
  detail::parallel_chunks(rules.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Rule& r = rules[i];
      const DirectionalSums sa = log_sums(compile_rule(r, log_a.alphabet()), log_a);
      const DirectionalSums sb = log_sums(compile_rule(r, log_b.alphabet()), log_b);
      MeasuredRule mr;
      mr.rule = r;
      mr.measure_a = measure_from_sums(m, r.tpl, sa, events_a, traces_a);
      mr.measure_b = measure_from_sums(m, r.tpl, sb, events_b, traces_b);
      mr.diff = std::abs(mr.measure_a - mr.measure_b);
      out.rules[i] = std::move(mr);
    }
  });
  return out;
}

struct PruneCounts {
  std::size_t below_diff = 0;     // inter-variant difference under m_diff_min
  std::size_t below_measure = 0;  // measure under m_min in both variants
};

// Drops rules whose difference is too small to be interesting and rules too
// weak in both variants. A rule failing both tests is tallied under the
// difference criterion.
inline PruneCounts prune_thresholds(std::vector<MeasuredRule>& rules, double m_min,
                                    double m_diff_min) {
  PruneCounts counts;
  std::vector<MeasuredRule> kept;
  kept.reserve(rules.size());
  for (auto& mr : rules) {
    if (mr.diff < m_diff_min) {
      ++counts.below_diff;
    } else if (mr.measure_a < m_min && mr.measure_b < m_min) {
      ++counts.below_measure;
    } else {
      kept.push_back(std::move(mr));
    }
  }
  rules = std::move(kept);
  return counts;
}

// Removes every rule that is a special case of another rule in the set with
// the same measure in at least one variant: the most generic phrasing of
// each equally-strong family survives. Witnesses are looked up in the
// original set, so removals do not cascade. Measure equality is exact: a
// specific rule can only tie its ancestor by accumulating identical count
// sums (or the min over directions picking the ancestor's own sums), and
// identical integer sums divide to identical doubles.
inline std::size_t hierarchical_simplification(std::vector<MeasuredRule>& rules) {
  std::unordered_map<Rule, const MeasuredRule*, RuleHash> by_rule;
  by_rule.reserve(rules.size());
  for (const auto& mr : rules) by_rule.emplace(mr.rule, &mr);

  std::vector<MeasuredRule> kept;
  kept.reserve(rules.size());
  std::size_t removed = 0;
  for (auto& mr : rules) {
    bool redundant = false;
    for (const Rule& anc : entailed_ancestors(mr.rule)) {
      const auto it = by_rule.find(anc);
      if (it == by_rule.end()) continue;
      const MeasuredRule& general = *it->second;
      if (mr.measure_a == general.measure_a || mr.measure_b == general.measure_b) {
        redundant = true;
        break;
      }
    }
    if (redundant)
      ++removed;
    else
      kept.push_back(std::move(mr));
  }
  rules = std::move(kept);
  return removed;
}

}  // namespace rulediff
