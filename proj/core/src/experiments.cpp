#include "cseval/experiments.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cseval/errors.hpp"

namespace cseval::harness {

std::string_view metric_key(Metric m) {
  switch (m) {
    case Metric::perplexity: return "perplexity";
    case Metric::fluency: return "fluency";
    case Metric::avg_cs: return "avg_cs";
    case Metric::wc_cs: return "wc_cs";
  }
  return "perplexity";
}

std::string_view metric_display(Metric m) {
  switch (m) {
    case Metric::perplexity: return "Perplexity";
    case Metric::fluency: return "Fluency";
    case Metric::avg_cs: return "Avg. CS";
    case Metric::wc_cs: return "WC CS";
  }
  return "Perplexity";
}

MetricDirection direction(Metric m) {
  return {m, m != Metric::perplexity};
}

double metric_value(const metrics::SequenceScores& s, Metric m) {
  switch (m) {
    case Metric::perplexity: return s.perplexity;
    case Metric::fluency: return s.fluency;
    case Metric::avg_cs: return s.avg_cs;
    case Metric::wc_cs: return s.wc_cs;
  }
  return s.perplexity;
}

int prefers_high(double low, double high, const MetricDirection& dir) {
  if (dir.higher_is_better) return high > low ? 1 : 0;
  return high < low ? 1 : 0;
}

int prefers_high(const metrics::SequenceScores& low,
                 const metrics::SequenceScores& high,
                 const MetricDirection& dir) {
  return prefers_high(metric_value(low, dir.metric),
                      metric_value(high, dir.metric), dir);
}

std::vector<std::string> unpaired_prompts(const records::Corpus& corpus,
                                          double low_temperature,
                                          double high_temperature) {
  std::set<std::string> ids;
  for (const auto& rec : corpus.all()) {
    if (rec.temperature == low_temperature ||
        rec.temperature == high_temperature) {
      ids.insert(rec.prompt_id);
    }
  }
  std::vector<std::string> offenders;
  for (const auto& id : ids) {
    if (corpus.find(id, low_temperature) == nullptr ||
        corpus.find(id, high_temperature) == nullptr) {
      offenders.push_back(id);
    }
  }
  return offenders;
}

Experiment1Result run_experiment1(const records::Corpus& corpus,
                                  const metrics::MetricConfig& cfg,
                                  const BootstrapParams& boot,
                                  double low_temperature,
                                  double high_temperature) {
  metrics::validate(cfg);

  const auto offenders =
      unpaired_prompts(corpus, low_temperature, high_temperature);
  if (!offenders.empty()) {
    std::ostringstream msg;
    msg << "prompts not paired at both temperatures:";
    for (const auto& id : offenders) msg << ' ' << id;
    throw ValidationError(msg.str());
  }

  std::set<std::string> ids;
  for (const auto& rec : corpus.all()) {
    if (rec.temperature == low_temperature ||
        rec.temperature == high_temperature) {
      ids.insert(rec.prompt_id);
    }
  }
  if (ids.empty()) {
    throw ValidationError("no records at the requested temperatures");
  }

  Experiment1Result result;
  result.low_temperature = low_temperature;
  result.high_temperature = high_temperature;
  result.config = cfg;
  result.bootstrap = boot;

  result.table.rows.reserve(ids.size());
  for (const auto& id : ids) {  // std::set iteration: sorted by prompt_id
    const auto* low_rec = corpus.find(id, low_temperature);
    const auto* high_rec = corpus.find(id, high_temperature);
    const auto low_scores = metrics::score_sequence(*low_rec, cfg);
    const auto high_scores = metrics::score_sequence(*high_rec, cfg);

    PreferenceRow row;
    row.prompt_id = id;
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      row.low[m] = metric_value(low_scores, kAllMetrics[m]);
      row.high[m] = metric_value(high_scores, kAllMetrics[m]);
      row.prefers[m] =
          prefers_high(row.low[m], row.high[m], direction(kAllMetrics[m]));
    }
    result.table.rows.push_back(std::move(row));
  }

  const std::size_t n = result.table.rows.size();
  std::array<std::vector<int>, 4> indicators;
  std::array<std::vector<double>, 4> low_vals;
  std::array<std::vector<double>, 4> high_vals;
  for (std::size_t m = 0; m < 4; ++m) {
    indicators[m].reserve(n);
    low_vals[m].reserve(n);
    high_vals[m].reserve(n);
  }
  for (const auto& row : result.table.rows) {
    for (std::size_t m = 0; m < 4; ++m) {
      indicators[m].push_back(row.prefers[m]);
      low_vals[m].push_back(row.low[m]);
      high_vals[m].push_back(row.high[m]);
    }
  }

  for (std::size_t m = 0; m < 4; ++m) {
    result.table.rates[m] = stats::bootstrap_ci_rate(
        indicators[m], boot.level, boot.resamples, boot.seed);
    result.wilcoxon[m] =
        stats::wilcoxon_signed_rank(low_vals[m], high_vals[m]);
  }

  // Confidence metrics against the fluency-style baselines, grouped by
  // baseline to mirror the presentation order of the difference table.
  const std::array<std::pair<Metric, Metric>, 4> comparisons = {{
      {Metric::avg_cs, Metric::perplexity},
      {Metric::wc_cs, Metric::perplexity},
      {Metric::avg_cs, Metric::fluency},
      {Metric::wc_cs, Metric::fluency},
  }};
  auto index_of = [](Metric m) {
    return static_cast<std::size_t>(
        std::find(kAllMetrics.begin(), kAllMetrics.end(), m) -
        kAllMetrics.begin());
  };
  for (const auto& [cs_metric, baseline] : comparisons) {
    RateDifference diff;
    diff.confidence_metric = cs_metric;
    diff.baseline = baseline;
    diff.ci = stats::bootstrap_ci_paired_diff(
        indicators[index_of(cs_metric)], indicators[index_of(baseline)],
        boot.level, boot.resamples, boot.seed);
    result.differences.push_back(diff);
  }
  return result;
}

Experiment2Result run_experiment2(const records::Corpus& corpus,
                                  const metrics::MetricConfig& cfg,
                                  const BootstrapParams& boot,
                                  double temperature) {
  metrics::validate(cfg);

  Experiment2Result result;
  result.temperature = temperature;
  result.config = cfg;
  result.bootstrap = boot;

  // Per-category score vectors in deterministic (prompt_id) order.
  std::array<std::map<std::string, metrics::SequenceScores>, 3> by_category;
  for (const auto& rec : corpus.all()) {
    if (rec.temperature != temperature) continue;
    for (std::size_t c = 0; c < kDifficultyCategories.size(); ++c) {
      if (rec.category == kDifficultyCategories[c]) {
        by_category[c].emplace(rec.prompt_id,
                               metrics::score_sequence(rec, cfg));
      }
    }
  }
  for (std::size_t c = 0; c < kDifficultyCategories.size(); ++c) {
    if (by_category[c].empty()) {
      throw ValidationError(
          "no records in category '" +
          std::string(records::to_string(kDifficultyCategories[c])) +
          "' at temperature " + std::to_string(temperature));
    }
    result.category_counts[c] = by_category[c].size();
  }

  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t m = 0; m < 4; ++m) {
      std::vector<double> values;
      values.reserve(by_category[c].size());
      for (const auto& [id, scores] : by_category[c]) {
        values.push_back(metric_value(scores, kAllMetrics[m]));
      }
      result.cells[c][m] = stats::bootstrap_ci_mean(
          values, boot.level, boot.resamples, boot.seed);
    }
  }

  result.all_disjoint = true;
  for (std::size_t m = 0; m < 4; ++m) {
    for (std::size_t p = 0; p < kCategoryPairs.size(); ++p) {
      const auto [c1, c2] = kCategoryPairs[p];
      result.disjoint[m][p] =
          stats::intervals_disjoint(result.cells[c1][m], result.cells[c2][m]);
      if (!result.disjoint[m][p]) result.all_disjoint = false;
    }
  }
  return result;
}

}  // namespace cseval::harness
