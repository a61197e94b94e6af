#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "rulediff/analysis.hpp"
#include "rulediff/declare.hpp"
#include "rulediff/event_log.hpp"
#include "rulediff/rng.hpp"

namespace rulediff {

// Shared evaluation cache: every distinct trace across both variants (a
// "kind") evaluated once against every rule under test. Cells are the four
// directional counts, kind-major, so summing a partition's measures never
// touches the raw traces again.
struct EncodingTable {
  std::vector<Rule> rules;
  std::vector<std::int32_t> kind_length;
  std::vector<std::int32_t> cells;  // kind-major, 4 ints per (kind, rule)

  std::size_t kind_count() const { return kind_length.size(); }

  std::span<const std::int32_t> row(std::size_t kind) const {
    return {cells.data() + kind * rules.size() * 4, rules.size() * 4};
  }
};

// One variant's composition over the shared table: how many instances of
// each kind it holds. Moving traces between variants is just moving counts.
struct EncodedLog {
  std::shared_ptr<const EncodingTable> table;
  std::vector<std::int64_t> multiplicity;  // per kind; zero when absent
  std::int64_t total_traces = 0;
  std::int64_t total_events = 0;
};

struct EncodedPair {
  EncodedLog a;
  EncodedLog b;
};

inline EncodedPair encode_logs(const EventLog& log_a, const EventLog& log_b,
                               const std::vector<MeasuredRule>& rules, int workers = 0) {
  auto table = std::make_shared<EncodingTable>();
  table->rules.reserve(rules.size());
  for (const auto& mr : rules) table->rules.push_back(mr.rule);

  // Pool distinct traces across both logs, comparing by activity names:
  // the two logs intern independently, so kinds are keyed on a joint
  // alphabet.
  Alphabet joint;
  struct KindRef {
    std::vector<ActivityId> events;  // joint ids
  };
  std::vector<KindRef> kinds;
  std::unordered_map<std::vector<ActivityId>, std::size_t, VecIdHash> kind_index;

  EncodedPair out;
  out.a.multiplicity.clear();
  const auto absorb = [&](const EventLog& log, std::vector<std::int64_t>& mult) {
    for (const auto& t : log.traces()) {
      std::vector<ActivityId> ids;
      ids.reserve(t.events.size());
      for (ActivityId e : t.events) ids.push_back(joint.intern(log.alphabet().name(e)));
      auto it = kind_index.find(ids);
      std::size_t k;
      if (it == kind_index.end()) {
        k = kinds.size();
        kind_index.emplace(ids, k);
        kinds.push_back(KindRef{std::move(ids)});
      } else {
        k = it->second;
      }
      if (mult.size() <= k) mult.resize(k + 1, 0);
      mult[k] += t.count;
    }
  };
  absorb(log_a, out.a.multiplicity);
  absorb(log_b, out.b.multiplicity);
  out.a.multiplicity.resize(kinds.size(), 0);
  out.b.multiplicity.resize(kinds.size(), 0);

  table->kind_length.resize(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k)
    table->kind_length[k] = static_cast<std::int32_t>(kinds[k].events.size());

  std::vector<CompiledRule> compiled;
  compiled.reserve(rules.size());
  for (const auto& mr : rules) compiled.push_back(compile_rule(mr.rule, joint));

  table->cells.assign(kinds.size() * rules.size() * 4, 0);
  detail::parallel_chunks(kinds.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      std::int32_t* cell = table->cells.data() + k * rules.size() * 4;
      for (std::size_t r = 0; r < rules.size(); ++r, cell += 4) {
        const DirectionalEvaluation ev = evaluate_directional(compiled[r], kinds[k].events);
        cell[0] = ev.fwd_activations;
        cell[1] = ev.fwd_satisfactions;
        cell[2] = ev.bwd_activations;
        cell[3] = ev.bwd_satisfactions;
      }
    }
  });

  const auto finish = [&](EncodedLog& enc, const EventLog& log) {
    enc.table = table;
    enc.total_traces = log.total_traces();
    enc.total_events = log.total_events();
  };
  finish(out.a, log_a);
  finish(out.b, log_b);
  return out;
}

// Pooled instance vector: one entry per trace instance, holding its kind.
// Variant A's instances come first; a Fisher-Yates pass plus a prefix split
// of this vector is one uniform re-partition.
inline std::vector<std::int32_t> pooled_instances(const EncodedLog& a, const EncodedLog& b) {
  std::vector<std::int32_t> pool;
  pool.reserve(static_cast<std::size_t>(a.total_traces + b.total_traces));
  for (std::size_t k = 0; k < a.multiplicity.size(); ++k)
    pool.insert(pool.end(), static_cast<std::size_t>(a.multiplicity[k]),
                static_cast<std::int32_t>(k));
  for (std::size_t k = 0; k < b.multiplicity.size(); ++k)
    pool.insert(pool.end(), static_cast<std::size_t>(b.multiplicity[k]),
                static_cast<std::int32_t>(k));
  return pool;
}

// One uniform re-partition of the pooled traces into the original sizes.
// The trace evaluations travel with the traces; nothing is re-evaluated.
inline EncodedPair shuffle_once(const EncodedLog& a, const EncodedLog& b, SplitMix64& rng) {
  std::vector<std::int32_t> pool = pooled_instances(a, b);
  fisher_yates(std::span<std::int32_t>(pool), rng);

  EncodedPair out;
  out.a.table = a.table;
  out.b.table = b.table;
  out.a.multiplicity.assign(a.multiplicity.size(), 0);
  out.b.multiplicity.assign(b.multiplicity.size(), 0);
  const std::size_t na = static_cast<std::size_t>(a.total_traces);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto& enc = i < na ? out.a : out.b;
    enc.multiplicity[static_cast<std::size_t>(pool[i])] += 1;
  }
  const auto finish = [&](EncodedLog& enc) {
    enc.total_traces = 0;
    enc.total_events = 0;
    const auto& lens = enc.table->kind_length;
    for (std::size_t k = 0; k < enc.multiplicity.size(); ++k) {
      enc.total_traces += enc.multiplicity[k];
      enc.total_events += enc.multiplicity[k] * lens[k];
    }
  };
  finish(out.a);
  finish(out.b);
  return out;
}

// Measure of one rule over an encoded variant, identical arithmetic to
// measuring the raw log.
inline double encoded_measure(const EncodedLog& enc, std::size_t rule_idx, MeasureKind m) {
  const auto& table = *enc.table;
  DirectionalSums sums;
  for (std::size_t k = 0; k < enc.multiplicity.size(); ++k) {
    const std::int64_t mult = enc.multiplicity[k];
    if (mult == 0) continue;
    const std::int32_t* cell = table.cells.data() + (k * table.rules.size() + rule_idx) * 4;
    sums.fwd_activations += mult * cell[0];
    sums.fwd_satisfactions += mult * cell[1];
    sums.bwd_activations += mult * cell[2];
    sums.bwd_satisfactions += mult * cell[3];
  }
  return measure_from_sums(m, table.rules[rule_idx].tpl, sums, enc.total_events,
                           enc.total_traces);
}

}  // namespace rulediff
