#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "rulediff/analysis.hpp"
#include "rulediff/encoding.hpp"
#include "rulediff/errors.hpp"
#include "rulediff/rng.hpp"

namespace rulediff {

// Result of the permutation test. Counters start at one: the observed
// partition itself counts as one arrangement at least as extreme, which
// also keeps every p-value strictly positive.
struct PermutationOutcome {
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> exceedances;  // per rule, the +1 excluded

  std::int64_t counter(std::size_t rule_idx) const { return exceedances[rule_idx] + 1; }
  double p_value(std::size_t rule_idx) const {
    return static_cast<double>(counter(rule_idx)) / static_cast<double>(iterations);
  }
};

namespace detail {

// Accumulated directional sums for every rule over one partition side.
struct PartitionSums {
  std::vector<std::int64_t> vals;  // 4 per rule
  std::int64_t traces = 0;
  std::int64_t events = 0;

  void reset(std::size_t rule_count) {
    vals.assign(rule_count * 4, 0);
    traces = 0;
    events = 0;
  }
};

// Sums for the prefix [0, na) of a permuted instance vector. Two routes with
// identical integer results: via a kind histogram (wins when kinds repeat a
// lot) or straight over instances (wins when most traces are distinct).
inline void accumulate_prefix(const EncodingTable& table, std::span<const std::int32_t> pool,
                              std::size_t na, std::vector<std::int64_t>& hist,
                              PartitionSums& out) {
  const std::size_t rc = table.rules.size();
  out.reset(rc);
  out.traces = static_cast<std::int64_t>(na);

  const std::size_t kinds = table.kind_count();
  if (kinds * 4 <= na) {
    std::fill(hist.begin(), hist.end(), 0);
    for (std::size_t i = 0; i < na; ++i) ++hist[static_cast<std::size_t>(pool[i])];
    for (std::size_t k = 0; k < kinds; ++k) {
      const std::int64_t mult = hist[k];
      if (mult == 0) continue;
      out.events += mult * table.kind_length[k];
      const std::int32_t* cell = table.cells.data() + k * rc * 4;
      for (std::size_t j = 0; j < rc * 4; ++j) out.vals[j] += mult * cell[j];
    }
  } else {
    for (std::size_t i = 0; i < na; ++i) {
      const std::size_t k = static_cast<std::size_t>(pool[i]);
      out.events += table.kind_length[k];
      const std::int32_t* cell = table.cells.data() + k * rc * 4;
      for (std::size_t j = 0; j < rc * 4; ++j) out.vals[j] += cell[j];
    }
  }
}

inline double partition_measure(const EncodingTable& table, const PartitionSums& s,
                                std::size_t rule_idx, MeasureKind m) {
  DirectionalSums sums;
  sums.fwd_activations = s.vals[rule_idx * 4 + 0];
  sums.fwd_satisfactions = s.vals[rule_idx * 4 + 1];
  sums.bwd_activations = s.vals[rule_idx * 4 + 2];
  sums.bwd_satisfactions = s.vals[rule_idx * 4 + 3];
  return measure_from_sums(m, table.rules[rule_idx].tpl, sums, s.events, s.traces);
}

}  // namespace detail

// Monte-Carlo permutation test: `iterations` uniform re-partitions of the
// pooled traces into the original variant sizes; a rule's exceedance tally
// grows whenever the re-partitioned measure difference is at least the
// observed one (ties included). Iteration i's partition depends only on
// (seed, i), so any worker count yields bit-identical results.
inline PermutationOutcome permutation_test(const EncodedLog& enc_a, const EncodedLog& enc_b,
                                           const std::vector<MeasuredRule>& rules,
                                           MeasureKind measure, std::int64_t iterations,
                                           std::uint64_t seed, int workers = 0) {
  const EncodingTable& table = *enc_a.table;
  if (table.rules.size() != rules.size())
    throw ConfigError("encoded logs do not match the rule set under test");

  PermutationOutcome out;
  out.iterations = iterations;
  out.seed = seed;
  out.exceedances.assign(rules.size(), 0);
  if (rules.empty() || iterations <= 0) return out;

  const std::vector<std::int32_t> pool = pooled_instances(enc_a, enc_b);
  const std::size_t na = static_cast<std::size_t>(enc_a.total_traces);

  const unsigned w = std::min<std::uint64_t>(detail::resolve_workers(workers),
                                             static_cast<std::uint64_t>(iterations));
  std::vector<std::vector<std::int64_t>> partial(w);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);

  const auto run_range = [&](unsigned slot, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t>& exceed = partial[slot];
    exceed.assign(rules.size(), 0);
    std::vector<std::int32_t> buf(pool.size());
    std::vector<std::int64_t> hist(table.kind_count());
    detail::PartitionSums sums_a, sums_b;
    for (std::int64_t it = lo; it < hi; ++it) {
      std::copy(pool.begin(), pool.end(), buf.begin());
      SplitMix64 rng = iteration_stream(seed, static_cast<std::uint64_t>(it));
      fisher_yates(std::span<std::int32_t>(buf), rng);
      detail::accumulate_prefix(table, buf, na, hist, sums_a);
      detail::accumulate_prefix(table, std::span<const std::int32_t>(buf).subspan(na),
                                buf.size() - na, hist, sums_b);
      for (std::size_t r = 0; r < rules.size(); ++r) {
        const double ma = detail::partition_measure(table, sums_a, r, measure);
        const double mb = detail::partition_measure(table, sums_b, r, measure);
        if (std::abs(ma - mb) >= rules[r].diff) ++exceed[r];
      }
    }
  };

  if (w <= 1) {
    run_range(0, 0, iterations);
  } else {
    const std::int64_t chunk = (iterations + w - 1) / w;
    for (unsigned i = 0; i < w; ++i) {
      const std::int64_t lo = static_cast<std::int64_t>(i) * chunk;
      const std::int64_t hi = std::min<std::int64_t>(iterations, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back([&, i, lo, hi] {
        try {
          run_range(i, lo, hi);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& p : partial)
    for (std::size_t r = 0; r < p.size(); ++r) out.exceedances[r] += p[r];
  return out;
}

// Exact permutation p-value by exhausting every split of the pooled traces
// into the original sizes (instances distinguishable, so trace multiplicity
// weights each split correctly). Feasible only for small pools; the guard
// keeps the C(n, na) enumeration from exploding.
inline double exact_pvalue_oracle(const EncodedLog& enc_a, const EncodedLog& enc_b,
                                  const std::vector<MeasuredRule>& rules, std::size_t rule_idx,
                                  MeasureKind measure, std::size_t max_pool = 15) {
  const EncodingTable& table = *enc_a.table;
  const std::vector<std::int32_t> pool = pooled_instances(enc_a, enc_b);
  if (pool.size() > max_pool)
    throw ConfigError("exact p-value enumeration limited to pooled size " +
                      std::to_string(max_pool) + ", got " + std::to_string(pool.size()));
  const std::size_t n = pool.size();
  const std::size_t na = static_cast<std::size_t>(enc_a.total_traces);
  const double e_diff = rules[rule_idx].diff;

  std::vector<std::int64_t> hist(table.kind_count());
  detail::PartitionSums sums_a, sums_b;
  std::vector<std::int32_t> arranged(n);

  // Enumerate na-subsets of instance positions in lexicographic order.
  std::vector<std::size_t> comb(na);
  for (std::size_t i = 0; i < na; ++i) comb[i] = i;
  std::int64_t total = 0;
  std::int64_t exceed = 0;
  for (;;) {
    std::size_t ai = 0, bi = na, ci = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_a = ci < na && comb[ci] == i;
      if (in_a) {
        arranged[ai++] = pool[i];
        ++ci;
      } else {
        arranged[bi++] = pool[i];
      }
    }
    detail::accumulate_prefix(table, arranged, na, hist, sums_a);
    detail::accumulate_prefix(table, std::span<const std::int32_t>(arranged).subspan(na),
                              n - na, hist, sums_b);
    const double ma = detail::partition_measure(table, sums_a, rule_idx, measure);
    const double mb = detail::partition_measure(table, sums_b, rule_idx, measure);
    ++total;
    if (std::abs(ma - mb) >= e_diff) ++exceed;

    // next combination
    std::size_t i = na;
    while (i > 0 && comb[i - 1] == n - na + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < na; ++j) comb[j] = comb[j - 1] + 1;
  }
  return static_cast<double>(exceed) / static_cast<double>(total);
}

}  // namespace rulediff
