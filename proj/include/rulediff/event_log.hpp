#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rulediff {

using Activity = std::string;
using ActivityId = std::int32_t;

// Sentinel id for an activity name not present in a log's alphabet. It never
// compares equal to any event, so rules over foreign activities simply never
// match.
inline constexpr ActivityId kNoActivity = -1;

class Alphabet {
public:
  ActivityId intern(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    const ActivityId id = static_cast<ActivityId>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  ActivityId find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? kNoActivity : it->second;
  }

  const std::string& name(ActivityId id) const { return names_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  // Names in lexicographic order; used wherever iteration order must be
  // independent of insertion order.
  std::vector<std::string> sorted_names() const;

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ActivityId> index_;
};

inline std::vector<std::string> Alphabet::sorted_names() const {
  std::vector<std::string> out = names_;
  std::sort(out.begin(), out.end());
  return out;
}

struct TraceEntry {
  std::vector<ActivityId> events;
  std::int64_t count = 0;  // multiplicity of this distinct trace
};

// FNV-1a over the id sequence; used wherever distinct traces are pooled.
struct VecIdHash {
  std::size_t operator()(const std::vector<ActivityId>& events) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (ActivityId id : events) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(id));
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

// A multiset of traces. Duplicate traces are collapsed eagerly into one
// TraceEntry with a multiplicity, which is what makes measuring and shuffling
// logs with heavy trace repetition cheap.
class EventLog {
public:
  ActivityId intern(std::string_view name) { return alphabet_.intern(name); }

  void add_trace(const std::vector<std::string>& events, std::int64_t count = 1) {
    std::vector<ActivityId> ids;
    ids.reserve(events.size());
    for (const auto& e : events) ids.push_back(alphabet_.intern(e));
    add_trace_ids(std::move(ids), count);
  }

  void add_trace_ids(std::vector<ActivityId>&& ids, std::int64_t count = 1) {
    auto it = trace_index_.find(ids);
    if (it != trace_index_.end()) {
      traces_[it->second].count += count;
    } else {
      trace_index_.emplace(ids, traces_.size());
      traces_.push_back(TraceEntry{std::move(ids), count});
    }
    total_traces_ += count;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<TraceEntry>& traces() const { return traces_; }
  std::int64_t total_traces() const { return total_traces_; }

  std::int64_t total_events() const {
    std::int64_t n = 0;
    for (const auto& t : traces_) n += t.count * static_cast<std::int64_t>(t.events.size());
    return n;
  }

  bool empty() const { return total_traces_ == 0; }

private:
  Alphabet alphabet_;
  std::vector<TraceEntry> traces_;
  std::unordered_map<std::vector<ActivityId>, std::size_t, VecIdHash> trace_index_;
  std::int64_t total_traces_ = 0;
};

struct LogStats {
  std::int64_t total_traces = 0;
  std::int64_t distinct_traces = 0;
  std::int64_t total_events = 0;
  std::int64_t distinct_activities = 0;
  std::int64_t min_trace_length = 0;
  std::int64_t max_trace_length = 0;
  double avg_trace_length = 0.0;
};

inline LogStats stats(const EventLog& log) {
  LogStats s;
  s.total_traces = log.total_traces();
  s.distinct_traces = static_cast<std::int64_t>(log.traces().size());
  s.distinct_activities = static_cast<std::int64_t>(log.alphabet().size());
  bool first = true;
  for (const auto& t : log.traces()) {
    const auto len = static_cast<std::int64_t>(t.events.size());
    s.total_events += t.count * len;
    if (first || len < s.min_trace_length) s.min_trace_length = len;
    if (first || len > s.max_trace_length) s.max_trace_length = len;
    first = false;
  }
  if (s.total_traces > 0)
    s.avg_trace_length = static_cast<double>(s.total_events) / static_cast<double>(s.total_traces);
  return s;
}

}  // namespace rulediff
