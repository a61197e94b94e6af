#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "rulediff/csv.hpp"
#include "rulediff/errors.hpp"
#include "rulediff/event_log.hpp"
#include "rulediff/pipeline.hpp"
#include "rulediff/report.hpp"
#include "rulediff/specification.hpp"
#include "rulediff/xes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

bool ends_with_nocase(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    char a = s[s.size() - suffix.size() + i];
    char b = suffix[i];
    if (std::tolower(static_cast<unsigned char>(a)) != std::tolower(static_cast<unsigned char>(b)))
      return false;
  }
  return true;
}

// File format is chosen by extension; a trailing .gz is transparent.
rulediff::EventLog load_log(const std::string& path, const rulediff::CsvMapping& mapping) {
  std::string base = path;
  if (ends_with_nocase(base, ".gz")) base.resize(base.size() - 3);
  if (ends_with_nocase(base, ".xes")) return rulediff::parse_xes(path);
  if (ends_with_nocase(base, ".csv")) return rulediff::parse_csv(path, mapping);
  throw rulediff::ConfigError("cannot tell the format of '" + path +
                              "': expected a .xes, .xes.gz, .csv, or .csv.gz file");
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void print_summary(const rulediff::AnalysisOutcome& outcome, const rulediff::LogStats& stats_a,
                   const rulediff::LogStats& stats_b, const rulediff::AnalysisParams& params,
                   const rulediff::OutputPaths& paths, double parse_s, double report_s,
                   double total_s) {
  auto print_variant = [](const char* name, const rulediff::LogStats& s) {
    std::printf("variant %s: %lld traces (%lld distinct), %lld events, %lld activities\n", name,
                static_cast<long long>(s.total_traces), static_cast<long long>(s.distinct_traces),
                static_cast<long long>(s.total_events),
                static_cast<long long>(s.distinct_activities));
  };
  print_variant("A", stats_a);
  print_variant("B", stats_b);
  if (outcome.discovery_ran) {
    std::printf("discovery: %zu rules in A, %zu rules in B (support >= %.2f, confidence >= %.2f)\n",
                outcome.rules_a, outcome.rules_b, params.discovery_support,
                params.discovery_confidence);
  } else {
    std::printf("discovery: skipped, models were supplied (%zu rules for A, %zu for B)\n",
                outcome.rules_a, outcome.rules_b);
  }
  std::printf("union: %zu rules\n", outcome.union_size);
  std::printf("pruned: %zu below the difference threshold (%.3f), %zu below the measure threshold (%.3f)\n",
              outcome.pruned.below_diff, params.m_diff_min, outcome.pruned.below_measure,
              params.m_min);
  std::printf("simplified: %zu rules dropped in favour of stricter ones\n",
              outcome.simplified_away);
  std::printf("tested: %zu rules, %lld permutations of %s, seed %llu\n", outcome.tested.size(),
              static_cast<long long>(outcome.permutations),
              rulediff::measure_name(outcome.measure),
              static_cast<unsigned long long>(outcome.seed));
  std::printf("significant: %zu rules at alpha %.3f\n", outcome.significant.size(),
              outcome.alpha);
  std::printf("output: %s, %s\n", paths.text.string().c_str(), paths.csv.string().c_str());
  for (const std::string& w : outcome.warnings) std::printf("warning: %s\n", w.c_str());
  const rulediff::PhaseTimings& t = outcome.timings;
  std::printf(
      "phases [s]: parse %.3f, discovery %.3f, aggregate %.3f, preprocess %.3f, "
      "encode %.3f, test %.3f, report %.3f, total %.3f\n",
      parse_s, t.discovery_s, t.aggregate_s, t.preprocess_s, t.encode_s, t.test_s, report_s,
      total_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Detects statistically significant behavioural differences between two "
      "process variants, reported as natural-language statements about "
      "declarative rules."};
  app.get_formatter()->column_width(34);

  std::string log_a_path, log_b_path;
  std::string model_a_path, model_b_path;
  std::string measure_word = "confidence";
  std::string out_dir = "rulediff_output";
  rulediff::AnalysisParams params;
  std::optional<std::uint64_t> seed_flag;
  rulediff::CsvMapping mapping;
  std::string order_col;

  app.add_option("--log-a", log_a_path, "Event log of variant A (.xes, .xes.gz, .csv, .csv.gz)")
      ->required();
  app.add_option("--log-b", log_b_path, "Event log of variant B (.xes, .xes.gz, .csv, .csv.gz)")
      ->required();
  app.add_option("--model-a", model_a_path,
                 "Rule set for variant A as JSON; skips discovery on log A");
  app.add_option("--model-b", model_b_path,
                 "Rule set for variant B as JSON; skips discovery on log B");
  app.add_option("--measure", measure_word, "Measure to compare: confidence or support")
      ->capture_default_str();
  app.add_option("--m-min", params.m_min, "Minimum measure a rule must reach in some variant")
      ->capture_default_str();
  app.add_option("--m-diff-min", params.m_diff_min,
                 "Minimum measure difference between the variants")
      ->capture_default_str();
  app.add_option("--permutations", params.permutations,
                 "Number of permutation test iterations")
      ->capture_default_str();
  app.add_option("--alpha", params.alpha, "Significance level for the permutation test")
      ->capture_default_str();
  app.add_option("--top-n", params.top_n, "Number of statements written to differences.txt")
      ->capture_default_str();
  app.add_option("--support-min", params.discovery_support,
                 "Support threshold for rule discovery")
      ->capture_default_str();
  app.add_option("--confidence-min", params.discovery_confidence,
                 "Confidence threshold for rule discovery")
      ->capture_default_str();
  app.add_option("--seed", seed_flag, "Seed for the permutation test (default: random)");
  app.add_option("--workers", params.workers, "Worker threads; 0 uses all cores")
      ->capture_default_str();
  app.add_option("--out-dir", out_dir, "Directory for differences.txt and differences.csv")
      ->capture_default_str();
  app.add_option("--csv-case-col", mapping.case_column, "CSV column holding the case identifier")
      ->capture_default_str();
  app.add_option("--csv-activity-col", mapping.activity_column,
                 "CSV column holding the activity name")
      ->capture_default_str();
  app.add_option("--csv-order-col", order_col,
                 "CSV column to order events by; 'none' keeps row order "
                 "(default: 'timestamp' when present, else row order)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto run_start = std::chrono::steady_clock::now();
  auto seconds_since = [](std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try {
    if (!order_col.empty()) mapping.order_column = order_col;
    if (measure_word == "confidence") {
      params.measure = rulediff::MeasureKind::Confidence;
    } else if (measure_word == "support") {
      params.measure = rulediff::MeasureKind::Support;
    } else {
      throw rulediff::ConfigError("unknown measure '" + measure_word +
                                  "': expected 'confidence' or 'support'");
    }
    params.seed = seed_flag ? *seed_flag : entropy_seed();
    params.validate();

    const auto parse_start = std::chrono::steady_clock::now();
    rulediff::EventLog log_a = load_log(log_a_path, mapping);
    rulediff::EventLog log_b = load_log(log_b_path, mapping);
    std::optional<rulediff::Specification> model_a, model_b;
    if (!model_a_path.empty()) model_a = rulediff::read_specification(model_a_path);
    if (!model_b_path.empty()) model_b = rulediff::read_specification(model_b_path);
    const double parse_s = seconds_since(parse_start);

    rulediff::AnalysisOutcome outcome =
        rulediff::analyze(log_a, log_b, params, std::move(model_a), std::move(model_b));

    const auto report_start = std::chrono::steady_clock::now();
    std::vector<rulediff::TestedRule> ranked = rulediff::rank(outcome.significant);
    rulediff::OutputPaths paths = rulediff::write_outputs(ranked, out_dir, params.top_n);
    const double report_s = seconds_since(report_start);

    print_summary(outcome, rulediff::stats(log_a), rulediff::stats(log_b), params, paths, parse_s,
                  report_s, seconds_since(run_start));
    if (outcome.degenerate) {
      std::fprintf(stderr, "error: no rules were left to test; the logs show no usable difference\n");
      return kExitDegenerate;
    }
    return kExitOk;
  } catch (const rulediff::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const rulediff::DegenerateError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDegenerate;
  } catch (const rulediff::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }
}
