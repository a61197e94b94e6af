#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulediff/errors.hpp"
#include "rulediff/event_log.hpp"

namespace rulediff {

enum class ConstraintTemplate : std::uint8_t {
  Participation,
  AtMostOne,
  RespondedExistence,
  Response,
  AlternateResponse,
  ChainResponse,
  Precedence,
  AlternatePrecedence,
  ChainPrecedence,
  CoExistence,
  Succession,
  AlternateSuccession,
  ChainSuccession,
};

inline constexpr int kTemplateCount = 13;

constexpr int arity(ConstraintTemplate t) {
  return (t == ConstraintTemplate::Participation || t == ConstraintTemplate::AtMostOne) ? 1 : 2;
}

// Coupling templates constrain both directions between the two activities.
constexpr bool is_coupling(ConstraintTemplate t) {
  switch (t) {
    case ConstraintTemplate::CoExistence:
    case ConstraintTemplate::Succession:
    case ConstraintTemplate::AlternateSuccession:
    case ConstraintTemplate::ChainSuccession:
      return true;
    default:
      return false;
  }
}

inline const char* template_name(ConstraintTemplate t) {
  static constexpr const char* kNames[kTemplateCount] = {
      "Participation",       "AtMostOne",      "RespondedExistence", "Response",
      "AlternateResponse",   "ChainResponse",  "Precedence",         "AlternatePrecedence",
      "ChainPrecedence",     "CoExistence",    "Succession",         "AlternateSuccession",
      "ChainSuccession",
  };
  return kNames[static_cast<int>(t)];
}

inline const std::vector<ConstraintTemplate>& all_templates() {
  static const std::vector<ConstraintTemplate> kAll = [] {
    std::vector<ConstraintTemplate> v;
    for (int i = 0; i < kTemplateCount; ++i) v.push_back(static_cast<ConstraintTemplate>(i));
    return v;
  }();
  return kAll;
}

inline std::optional<ConstraintTemplate> parse_template(std::string_view name) {
  for (ConstraintTemplate t : all_templates())
    if (name == template_name(t)) return t;
  return std::nullopt;
}

// A rule instance. Activities are carried by name so rules are portable
// across logs with different alphabets; `target` is empty for unary
// templates.
struct Rule {
  ConstraintTemplate tpl;
  std::string activator;
  std::string target;

  bool operator==(const Rule& o) const = default;
};

inline Rule make_unary(ConstraintTemplate t, std::string activity) {
  return Rule{t, std::move(activity), std::string{}};
}

inline Rule make_binary(ConstraintTemplate t, std::string activator, std::string target) {
  return Rule{t, std::move(activator), std::move(target)};
}

inline void validate_rule(const Rule& r) {
  if (r.activator.empty()) throw ConfigError("rule has an empty activator activity");
  if (arity(r.tpl) == 1) {
    if (!r.target.empty())
      throw ConfigError(std::string(template_name(r.tpl)) + " takes a single activity");
  } else {
    if (r.target.empty())
      throw ConfigError(std::string(template_name(r.tpl)) + " takes two activities");
    if (r.activator == r.target)
      throw ConfigError(std::string(template_name(r.tpl)) +
                        " requires two distinct activities, got '" + r.activator + "' twice");
  }
}

inline std::string to_string(const Rule& r) {
  std::string s = template_name(r.tpl);
  s += '(';
  s += r.activator;
  if (arity(r.tpl) == 2) {
    s += ", ";
    s += r.target;
  }
  s += ')';
  return s;
}

// Deterministic global order: template index, then activator, then target.
inline bool rule_less(const Rule& a, const Rule& b) {
  if (a.tpl != b.tpl) return static_cast<int>(a.tpl) < static_cast<int>(b.tpl);
  if (a.activator != b.activator) return a.activator < b.activator;
  return a.target < b.target;
}

struct RuleHash {
  std::size_t operator()(const Rule& r) const {
    std::size_t h = std::hash<std::string>{}(r.activator);
    h ^= std::hash<std::string>{}(r.target) + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(r.tpl) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  }
};

// Counts over one trace. For coupling templates the two directions are kept
// apart: forward covers the activator-side obligations, backward the
// target-side ones. One-sided and unary templates only use forward.
struct DirectionalEvaluation {
  std::int32_t fwd_activations = 0;
  std::int32_t fwd_satisfactions = 0;
  std::int32_t bwd_activations = 0;
  std::int32_t bwd_satisfactions = 0;
};

// Per-trace activation/satisfaction counts as a single pair (directions
// summed for coupling templates).
struct TraceEvaluation {
  std::int32_t activations = 0;
  std::int32_t satisfactions = 0;

  bool operator==(const TraceEvaluation& o) const = default;
};

namespace detail {

using TraceSpan = std::span<const ActivityId>;

// Each a activates; satisfied iff some b occurs later.
inline void eval_response(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                          std::int32_t& sat) {
  bool seen_b = false;
  for (std::size_t i = t.size(); i-- > 0;) {
    if (t[i] == a) {
      ++act;
      if (seen_b) ++sat;
    }
    if (t[i] == b) seen_b = true;
  }
}

// Each a activates; satisfied iff some b occurs later with no other a
// strictly in between.
inline void eval_alternate_response(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                                    std::int32_t& sat) {
  bool pending = false;
  for (ActivityId e : t) {
    if (e == a) {
      ++act;
      pending = true;
    } else if (e == b && pending) {
      ++sat;
      pending = false;
    }
  }
}

// Each a activates; satisfied iff the immediately next event is b.
inline void eval_chain_response(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                                std::int32_t& sat) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == a) {
      ++act;
      if (i + 1 < t.size() && t[i + 1] == b) ++sat;
    }
  }
}

// Each b activates; satisfied iff some a occurs earlier.
inline void eval_precedence(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                            std::int32_t& sat) {
  bool seen_a = false;
  for (ActivityId e : t) {
    if (e == b) {
      ++act;
      if (seen_a) ++sat;
    }
    if (e == a) seen_a = true;
  }
}

// Each b activates; satisfied iff some a occurs earlier with no other b
// strictly in between. Equivalent single-pass form: the closest preceding
// a-or-b event must be an a.
inline void eval_alternate_precedence(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                                      std::int32_t& sat) {
  enum : std::uint8_t { kNone, kA, kB } last = kNone;
  for (ActivityId e : t) {
    if (e == b) {
      ++act;
      if (last == kA) ++sat;
      last = kB;
    } else if (e == a) {
      last = kA;
    }
  }
}

// Each b activates; satisfied iff the immediately previous event is a.
inline void eval_chain_precedence(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                                  std::int32_t& sat) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == b) {
      ++act;
      if (i > 0 && t[i - 1] == a) ++sat;
    }
  }
}

// Each a activates; satisfied iff b occurs anywhere in the trace.
inline void eval_responded_existence(ActivityId a, ActivityId b, TraceSpan t, std::int32_t& act,
                                     std::int32_t& sat) {
  std::int32_t cnt_a = 0;
  bool has_b = false;
  for (ActivityId e : t) {
    if (e == a) ++cnt_a;
    if (e == b) has_b = true;
  }
  act += cnt_a;
  if (has_b) sat += cnt_a;
}

inline DirectionalEvaluation evaluate_ids(ConstraintTemplate tpl, ActivityId a, ActivityId b,
                                          TraceSpan t) {
  DirectionalEvaluation ev;
  switch (tpl) {
    case ConstraintTemplate::Participation: {
      ev.fwd_activations = 1;
      for (ActivityId e : t)
        if (e == a) {
          ev.fwd_satisfactions = 1;
          break;
        }
      break;
    }
    case ConstraintTemplate::AtMostOne: {
      ev.fwd_activations = 1;
      std::int32_t cnt = 0;
      for (ActivityId e : t)
        if (e == a) ++cnt;
      ev.fwd_satisfactions = cnt <= 1 ? 1 : 0;
      break;
    }
    case ConstraintTemplate::RespondedExistence:
      eval_responded_existence(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::Response:
      eval_response(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::AlternateResponse:
      eval_alternate_response(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::ChainResponse:
      eval_chain_response(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::Precedence:
      eval_precedence(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::AlternatePrecedence:
      eval_alternate_precedence(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::ChainPrecedence:
      eval_chain_precedence(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      break;
    case ConstraintTemplate::CoExistence:
      eval_responded_existence(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      eval_responded_existence(b, a, t, ev.bwd_activations, ev.bwd_satisfactions);
      break;
    case ConstraintTemplate::Succession:
      eval_response(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      eval_precedence(a, b, t, ev.bwd_activations, ev.bwd_satisfactions);
      break;
    case ConstraintTemplate::AlternateSuccession:
      eval_alternate_response(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      eval_alternate_precedence(a, b, t, ev.bwd_activations, ev.bwd_satisfactions);
      break;
    case ConstraintTemplate::ChainSuccession:
      eval_chain_response(a, b, t, ev.fwd_activations, ev.fwd_satisfactions);
      eval_chain_precedence(a, b, t, ev.bwd_activations, ev.bwd_satisfactions);
      break;
  }
  return ev;
}

}  // namespace detail

// A rule resolved against one log's alphabet for fast repeated evaluation.
struct CompiledRule {
  ConstraintTemplate tpl;
  ActivityId activator = kNoActivity;
  ActivityId target = kNoActivity;
};

inline CompiledRule compile_rule(const Rule& r, const Alphabet& alphabet) {
  validate_rule(r);
  CompiledRule c;
  c.tpl = r.tpl;
  c.activator = alphabet.find(r.activator);
  if (arity(r.tpl) == 2) c.target = alphabet.find(r.target);
  return c;
}

inline DirectionalEvaluation evaluate_directional(const CompiledRule& c,
                                                  std::span<const ActivityId> trace) {
  return detail::evaluate_ids(c.tpl, c.activator, c.target, trace);
}

inline TraceEvaluation evaluate_trace(const Rule& r, const Alphabet& alphabet,
                                      std::span<const ActivityId> trace) {
  const DirectionalEvaluation ev = evaluate_directional(compile_rule(r, alphabet), trace);
  return TraceEvaluation{ev.fwd_activations + ev.bwd_activations,
                         ev.fwd_satisfactions + ev.bwd_satisfactions};
}

enum class MeasureKind : std::uint8_t { Support, Confidence };

inline const char* measure_name(MeasureKind m) {
  return m == MeasureKind::Support ? "support" : "confidence";
}

// Directional count sums over a whole log (event multiplicity applied).
struct DirectionalSums {
  std::int64_t fwd_activations = 0;
  std::int64_t fwd_satisfactions = 0;
  std::int64_t bwd_activations = 0;
  std::int64_t bwd_satisfactions = 0;

  void add(const DirectionalEvaluation& ev, std::int64_t mult) {
    fwd_activations += mult * ev.fwd_activations;
    fwd_satisfactions += mult * ev.fwd_satisfactions;
    bwd_activations += mult * ev.bwd_activations;
    bwd_satisfactions += mult * ev.bwd_satisfactions;
  }
};

namespace detail {

inline double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

// Log-level measure from count sums. Confidence divides satisfactions by
// activations; Support divides by the total event count (total trace count
// for unary templates, whose activation is per trace). Zero denominators
// yield 0. Coupling templates take the weaker of their two directions, which
// keeps every measure non-increasing from general to specific along the
// entailment order -- the redundancy-pruning step depends on that.
inline double measure_from_sums(MeasureKind m, ConstraintTemplate tpl, const DirectionalSums& s,
                                std::int64_t total_events, std::int64_t total_traces) {
  if (m == MeasureKind::Confidence) {
    const double fwd = detail::ratio(s.fwd_satisfactions, s.fwd_activations);
    if (!is_coupling(tpl)) return fwd;
    const double bwd = detail::ratio(s.bwd_satisfactions, s.bwd_activations);
    return fwd < bwd ? fwd : bwd;
  }
  if (arity(tpl) == 1) return detail::ratio(s.fwd_satisfactions, total_traces);
  if (!is_coupling(tpl)) return detail::ratio(s.fwd_satisfactions, total_events);
  const std::int64_t weaker = s.fwd_satisfactions < s.bwd_satisfactions ? s.fwd_satisfactions
                                                                        : s.bwd_satisfactions;
  return detail::ratio(weaker, total_events);
}

inline DirectionalSums log_sums(const CompiledRule& c, const EventLog& log) {
  DirectionalSums s;
  for (const auto& t : log.traces()) s.add(evaluate_directional(c, t.events), t.count);
  return s;
}

inline double log_measure(MeasureKind m, const Rule& r, const EventLog& log) {
  const DirectionalSums s = log_sums(compile_rule(r, log.alphabet()), log);
  return measure_from_sums(m, r.tpl, s, log.total_events(), log.total_traces());
}

inline double log_confidence(const Rule& r, const EventLog& log) {
  return log_measure(MeasureKind::Confidence, r, log);
}

inline double log_support(const Rule& r, const EventLog& log) {
  return log_measure(MeasureKind::Support, r, log);
}

// ---------------------------------------------------------------------------
// Entailment (subsumption) between templates.
// ---------------------------------------------------------------------------

namespace detail {

// closure[t][t2][o]: rule with template t over (a, b) entails template t2
// over (a, b) when o == 0, over (b, a) when o == 1.
struct EntailmentClosure {
  bool reach[kTemplateCount][kTemplateCount][2] = {};

  EntailmentClosure() {
    // Direct edges, specific -> general. The orientation flag flips the
    // activity pair (Precedence-side obligations generalise to the
    // existence rule read in the opposite direction).
    struct Edge {
      ConstraintTemplate from, to;
      bool flip;
    };
    static constexpr ConstraintTemplate CS = ConstraintTemplate::ChainSuccession;
    static constexpr ConstraintTemplate AS = ConstraintTemplate::AlternateSuccession;
    static constexpr ConstraintTemplate SU = ConstraintTemplate::Succession;
    static constexpr ConstraintTemplate CE = ConstraintTemplate::CoExistence;
    static constexpr ConstraintTemplate CR = ConstraintTemplate::ChainResponse;
    static constexpr ConstraintTemplate AR = ConstraintTemplate::AlternateResponse;
    static constexpr ConstraintTemplate RE = ConstraintTemplate::Response;
    static constexpr ConstraintTemplate CP = ConstraintTemplate::ChainPrecedence;
    static constexpr ConstraintTemplate AP = ConstraintTemplate::AlternatePrecedence;
    static constexpr ConstraintTemplate PR = ConstraintTemplate::Precedence;
    static constexpr ConstraintTemplate RX = ConstraintTemplate::RespondedExistence;
    const Edge edges[] = {
        {CS, CR, false}, {CS, CP, false}, {CS, AS, false},
        {AS, AR, false}, {AS, AP, false}, {AS, SU, false},
        {SU, RE, false}, {SU, PR, false}, {SU, CE, false},
        {CR, AR, false}, {AR, RE, false}, {RE, RX, false},
        {CP, AP, false}, {AP, PR, false}, {PR, RX, true},
        {CE, RX, false}, {CE, RX, true},
    };

    bool direct[kTemplateCount][kTemplateCount][2] = {};
    for (const Edge& e : edges)
      direct[static_cast<int>(e.from)][static_cast<int>(e.to)][e.flip ? 1 : 0] = true;

    // Transitive closure; flips compose (flip of flip restores orientation).
    for (int t = 0; t < kTemplateCount; ++t) {
      bool frontier[kTemplateCount][2] = {};
      frontier[t][0] = true;
      bool changed = true;
      while (changed) {
        changed = false;
        for (int u = 0; u < kTemplateCount; ++u)
          for (int o = 0; o < 2; ++o) {
            if (!frontier[u][o]) continue;
            for (int v = 0; v < kTemplateCount; ++v)
              for (int eo = 0; eo < 2; ++eo) {
                if (!direct[u][v][eo]) continue;
                const int no = o ^ eo;
                if (!frontier[v][no]) {
                  frontier[v][no] = true;
                  changed = true;
                }
              }
          }
      }
      for (int u = 0; u < kTemplateCount; ++u)
        for (int o = 0; o < 2; ++o) reach[t][u][o] = frontier[u][o];
    }
  }
};

inline const EntailmentClosure& entailment_closure() {
  static const EntailmentClosure kClosure;
  return kClosure;
}

}  // namespace detail

// True iff every trace satisfying `specific` satisfies `general`
// (reflexive). Unary templates are unrelated to each other and to binary
// ones.
inline bool entails(const Rule& specific, const Rule& general) {
  if (specific == general) return true;
  if (arity(specific.tpl) != 2 || arity(general.tpl) != 2) return false;
  const auto& cl = detail::entailment_closure();
  const int s = static_cast<int>(specific.tpl);
  const int g = static_cast<int>(general.tpl);
  if (specific.activator == general.activator && specific.target == general.target)
    return cl.reach[s][g][0];
  if (specific.activator == general.target && specific.target == general.activator)
    return cl.reach[s][g][1];
  return false;
}

// All rules a given rule entails, itself excluded.
inline std::vector<Rule> entailed_ancestors(const Rule& r) {
  std::vector<Rule> out;
  if (arity(r.tpl) != 2) return out;
  const auto& cl = detail::entailment_closure();
  const int s = static_cast<int>(r.tpl);
  for (int g = 0; g < kTemplateCount; ++g) {
    for (int o = 0; o < 2; ++o) {
      if (!cl.reach[s][g][o]) continue;
      Rule anc{static_cast<ConstraintTemplate>(g),
               o == 0 ? r.activator : r.target,
               o == 0 ? r.target : r.activator};
      if (anc == r) continue;
      out.push_back(std::move(anc));
    }
  }
  return out;
}

}  // namespace rulediff
