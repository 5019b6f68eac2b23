#pragma once

/**
 * Percentile bootstrap confidence intervals, the Wilcoxon signed-rank test,
 * and interval-disjointness checks.
 *
 * Every bootstrap routine is a pure function of (data, level, resamples,
 * seed). Resample b draws its indices from substream(seed, b), so resamples
 * can be evaluated in any order or concurrently with bitwise-identical
 * results.
 *
 * Quantile convention: nearest rank on the sorted resample statistics, i.e.
 * value at index ceil(q * B) (1-based). On 0/1 indicator data of length n the
 * resulting endpoints are therefore exact multiples of 1/n.
 */

#include <cstdint>
#include <span>

namespace cseval::stats {

struct ConfidenceInterval {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  int resamples = 0;
  std::uint64_t seed = 0;

  bool operator==(const ConfidenceInterval&) const = default;
};

/// Minimum resample count accepted by the bootstrap routines.
inline constexpr int kMinResamples = 1000;

/// Percentile-bootstrap CI for a preference rate over 0/1 indicators.
/// point = mean(indicators). Throws ValidationError on empty input or
/// resamples < kMinResamples.
ConfidenceInterval bootstrap_ci_rate(std::span<const int> indicators,
                                     double level, int resamples,
                                     std::uint64_t seed);

/// Percentile-bootstrap CI for the mean of real-valued data. A 0/1 vector
/// gives bounds identical to bootstrap_ci_rate under the same seed.
ConfidenceInterval bootstrap_ci_mean(std::span<const double> values,
                                     double level, int resamples,
                                     std::uint64_t seed);

/// Percentile-bootstrap CI for mean(a) - mean(b) with paired (joint-index)
/// resampling; element i of both vectors refers to the same prompt. With b
/// identically zero this reduces bit-for-bit to bootstrap_ci_rate(a) under
/// the same seed.
ConfidenceInterval bootstrap_ci_paired_diff(std::span<const int> indicators_a,
                                            std::span<const int> indicators_b,
                                            double level, int resamples,
                                            std::uint64_t seed);

/// True iff the closed intervals do not touch. Requires equal levels.
bool intervals_disjoint(const ConfidenceInterval& a,
                        const ConfidenceInterval& b);

enum class WilcoxonMode { exact, normal_approx };

struct WilcoxonResult {
  std::size_t n_effective = 0;  // pairs remaining after zero differences drop
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;
  WilcoxonMode mode = WilcoxonMode::exact;

  bool degenerate() const { return n_effective == 0; }
};

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; absolute differences are ranked with midranks for ties. The
/// p-value is exact (full null distribution over sign assignments) when
/// n_effective <= kWilcoxonExactLimit and there are no ties, otherwise a
/// normal approximation with tie-corrected variance and 0.5 continuity
/// correction. All differences zero yields the degenerate result p = 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y);

inline constexpr std::size_t kWilcoxonExactLimit = 25;

namespace detail {

/// Nearest-rank quantile of an ascending-sorted array.
double sorted_quantile(std::span<const double> sorted, double q);

/// Normal-approximation two-sided p-value for a signed-rank statistic.
/// tie_term = sum over tie groups of (t^3 - t).
double wilcoxon_normal_p(double w_plus, std::size_t n_effective,
                         double tie_term);

}  // namespace detail

}  // namespace cseval::stats
