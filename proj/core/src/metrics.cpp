#include "cseval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cseval/errors.hpp"

namespace cseval::metrics {

void validate(const MetricConfig& cfg) {
  if (cfg.top_n < 2) {
    throw ValidationError(
        "top_n must be >= 2 (a singleton set has zero dispersion), got " +
        std::to_string(cfg.top_n));
  }
}

double population_std(std::span<const double> values) {
  if (values.empty()) {
    throw ValidationError("population_std requires a non-empty input");
  }
  const double m = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / m;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return std::sqrt(ss / m);
}

double token_cs(const records::TokenObservation& obs,
                const MetricConfig& cfg) {
  validate(cfg);
  const std::size_t n = static_cast<std::size_t>(cfg.top_n);
  if (obs.top_alternatives.size() < n) {
    throw ScoringError(
        0, "token has " + std::to_string(obs.top_alternatives.size()) +
               " alternatives, need top_n = " + std::to_string(cfg.top_n));
  }
  // S_t: the first top_n alternatives by provider rank, raw probabilities.
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::exp(obs.top_alternatives[i].logprob);
  }
  const double sigma = population_std(probs);
  return std::exp(obs.chosen_logprob) * sigma;
}

SequenceScores score_sequence(const records::GenerationRecord& rec,
                              const MetricConfig& cfg) {
  validate(cfg);
  if (rec.tokens.empty()) {
    throw ValidationError("record '" + rec.prompt_id + "' has no tokens");
  }

  SequenceScores s;
  s.token_cs.reserve(rec.tokens.size());
  double logprob_sum = 0.0;
  for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
    logprob_sum += rec.tokens[t].chosen_logprob;
    try {
      s.token_cs.push_back(token_cs(rec.tokens[t], cfg));
    } catch (const ScoringError& e) {
      throw ScoringError(t, "record '" + rec.prompt_id + "' token " +
                                std::to_string(t) + ": " + e.what());
    }
  }

  const double count = static_cast<double>(rec.tokens.size());
  s.fluency = logprob_sum / count;
  s.perplexity = std::exp(-s.fluency);

  double cs_sum = 0.0;
  for (double cs : s.token_cs) cs_sum += cs;
  s.avg_cs = cs_sum / count;
  s.wc_cs = *std::min_element(s.token_cs.begin(), s.token_cs.end());
  return s;
}

}  // namespace cseval::metrics
