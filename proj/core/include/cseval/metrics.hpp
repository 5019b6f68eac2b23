#pragma once

/**
 * Token-level Confidence Score and the four sequence-level metrics.
 *
 * For one token the score is
 *
 *   cs = P(chosen) * population_std(top-n probabilities)
 *
 * where P(chosen) is the probability of the token the model actually emitted
 * (not necessarily the rank-1 candidate) and the top-n set is taken by
 * provider rank from the stored alternatives, raw and unrenormalized.
 *
 * Sequence level:
 *   fluency    = mean chosen-token log-probability      (higher is better)
 *   perplexity = exp(-fluency)                          (lower is better)
 *   avg_cs     = mean token cs                          (higher is better)
 *   wc_cs      = min  token cs                          (higher is better)
 */

#include <span>
#include <vector>

#include "cseval/records.hpp"

namespace cseval::metrics {

struct MetricConfig {
  /// Size of the top-n set fed to the dispersion term. Must be >= 2: a
  /// singleton has zero dispersion by definition and would make every score 0.
  int top_n = 3;
};

/// Throws ValidationError if the configuration is unusable.
void validate(const MetricConfig& cfg);

/// Population standard deviation (divisor m, not m-1). Throws ValidationError
/// on empty input.
double population_std(std::span<const double> values);

/// Confidence score for a single token. Throws ScoringError when the
/// observation carries fewer than cfg.top_n alternatives.
double token_cs(const records::TokenObservation& obs, const MetricConfig& cfg);

struct SequenceScores {
  double perplexity = 1.0;
  double fluency = 0.0;
  double avg_cs = 0.0;
  double wc_cs = 0.0;
  std::vector<double> token_cs;
};

/// Scores one record. Throws ScoringError naming the token index if any
/// token cannot be scored.
SequenceScores score_sequence(const records::GenerationRecord& rec,
                              const MetricConfig& cfg);

/// Upper bound of a single token's score for top_n = 3 (reached only by the
/// distribution [1, 0, 0] with chosen probability 1): sqrt(2)/3.
inline constexpr double kMaxTokenCsTop3 = 0.47140452079103168;

}  // namespace cseval::metrics
