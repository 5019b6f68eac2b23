#pragma once

/**
 * The two statistical experiments run over a corpus.
 *
 * Experiment 1 (creativity preference): pairs each prompt's low- and
 * high-temperature generations, asks each metric which one it prefers, and
 * reports per-metric preference rates, bootstrapped rate differences of the
 * confidence metrics against the fluency baselines, and a Wilcoxon
 * signed-rank test per metric.
 *
 * Experiment 2 (difficulty separation): per (category, metric) mean scores
 * with bootstrap CIs and a pairwise CI-disjointness matrix.
 */

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cseval/metrics.hpp"
#include "cseval/records.hpp"
#include "cseval/stats.hpp"

namespace cseval::harness {

enum class Metric { perplexity, fluency, avg_cs, wc_cs };

inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::perplexity, Metric::fluency, Metric::avg_cs, Metric::wc_cs};

/// Identifier used in machine-readable output ("perplexity", "avg_cs", ...).
std::string_view metric_key(Metric m);
/// Presentation name used in report tables ("Perplexity", "Avg. CS", ...).
std::string_view metric_display(Metric m);

struct MetricDirection {
  Metric metric = Metric::perplexity;
  bool higher_is_better = false;
};

/// Canonical direction for a metric: lower is better for perplexity, higher
/// for everything else.
MetricDirection direction(Metric m);

double metric_value(const metrics::SequenceScores& s, Metric m);

/// 1 iff `high` is strictly better than `low` under the direction; ties are
/// counted as not preferring the high-temperature response.
int prefers_high(double low, double high, const MetricDirection& dir);
int prefers_high(const metrics::SequenceScores& low,
                 const metrics::SequenceScores& high,
                 const MetricDirection& dir);

struct BootstrapParams {
  double level = 0.95;
  int resamples = 10000;
  std::uint64_t seed = 42;
};

struct PreferenceRow {
  std::string prompt_id;
  std::array<double, 4> low = {};   // metric values, kAllMetrics order
  std::array<double, 4> high = {};
  std::array<int, 4> prefers = {};  // 1 if high-T strictly better
};

struct PreferenceTable {
  std::vector<PreferenceRow> rows;                 // sorted by prompt_id
  std::array<stats::ConfidenceInterval, 4> rates;  // kAllMetrics order
};

struct RateDifference {
  Metric confidence_metric;  // avg_cs or wc_cs
  Metric baseline;           // perplexity or fluency
  stats::ConfidenceInterval ci;
};

struct Experiment1Result {
  PreferenceTable table;
  std::vector<RateDifference> differences;  // the four cs-vs-baseline rows
  std::array<stats::WilcoxonResult, 4> wilcoxon;
  double low_temperature = 0.1;
  double high_temperature = 1.1;
  metrics::MetricConfig config;
  BootstrapParams bootstrap;
};

/// Prompt ids that are not present at exactly both temperatures.
std::vector<std::string> unpaired_prompts(const records::Corpus& corpus,
                                          double low_temperature,
                                          double high_temperature);

/// Runs experiment 1. Throws ValidationError listing offenders when any
/// prompt is unpaired, and ScoringError if a record cannot be scored.
Experiment1Result run_experiment1(const records::Corpus& corpus,
                                  const metrics::MetricConfig& cfg,
                                  const BootstrapParams& boot,
                                  double low_temperature = 0.1,
                                  double high_temperature = 1.1);

inline constexpr std::array<records::Category, 3> kDifficultyCategories = {
    records::Category::easy, records::Category::medium,
    records::Category::hard};

/// Category pairs checked for CI overlap, as indices into
/// kDifficultyCategories: (easy, medium), (easy, hard), (medium, hard).
inline constexpr std::array<std::pair<int, int>, 3> kCategoryPairs = {
    {{0, 1}, {0, 2}, {1, 2}}};

struct Experiment2Result {
  // cells[category][metric], both in the canonical orders above
  std::array<std::array<stats::ConfidenceInterval, 4>, 3> cells = {};
  std::array<std::size_t, 3> category_counts = {};
  // disjoint[metric][pair]
  std::array<std::array<bool, 3>, 4> disjoint = {};
  bool all_disjoint = false;
  double temperature = 0.5;
  metrics::MetricConfig config;
  BootstrapParams bootstrap;
};

/// Runs experiment 2 on the records at the given temperature. Throws
/// ValidationError when a difficulty category has no records.
Experiment2Result run_experiment2(const records::Corpus& corpus,
                                  const metrics::MetricConfig& cfg,
                                  const BootstrapParams& boot,
                                  double temperature = 0.5);

}  // namespace cseval::harness
