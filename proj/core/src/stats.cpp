#include "cseval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cseval/errors.hpp"
#include "cseval/rng.hpp"

namespace cseval::stats {

namespace detail {

double sorted_quantile(std::span<const double> sorted, double q) {
  // Nearest rank: ceil(q * B), 1-based. The small nudge keeps exact-integer
  // products (e.g. 0.025 * 10000) from ceiling one rank too high after
  // floating-point rounding.
  const double b = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double wilcoxon_normal_p(double w_plus, std::size_t n_effective,
                         double tie_term) {
  const double n = static_cast<double>(n_effective);
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return 1.0;
  double delta = w_plus - mean;
  // 0.5 continuity correction toward the mean.
  if (delta > 0.0) {
    delta -= 0.5;
  } else if (delta < 0.0) {
    delta += 0.5;
  }
  const double z = delta / std::sqrt(var);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

}  // namespace detail

namespace {

void check_bootstrap_args(std::size_t size, int resamples) {
  if (size == 0) {
    throw ValidationError("bootstrap requires non-empty data");
  }
  if (resamples < kMinResamples) {
    throw ValidationError("bootstrap requires at least " +
                          std::to_string(kMinResamples) + " resamples, got " +
                          std::to_string(resamples));
  }
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence level must lie in (0, 1)");
  }
}

/// Shared percentile engine. `b` may be empty (plain mean) or equally sized
/// (paired difference of means). Index draws are identical in both cases, so
/// a paired difference against an all-zero vector is bit-for-bit the plain
/// CI of the other vector.
ConfidenceInterval percentile_bootstrap(std::span<const double> a,
                                        std::span<const double> b,
                                        double level, int resamples,
                                        std::uint64_t seed) {
  check_bootstrap_args(a.size(), resamples);
  check_level(level);
  const std::size_t n = a.size();
  const bool paired = !b.empty();

  // The statistic is mean(a) - mean(b), evaluated as a difference of means
  // (not a mean of differences) so the paired point estimate equals the
  // difference of the two individually computed rates exactly.
  const double den = static_cast<double>(n);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for (std::size_t r = 0; r < stats.size(); ++r) {
    SplitMix64 rng = substream(seed, r);
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(rng.bounded(n));
      sum_a += a[idx];
      if (paired) sum_b += b[idx];
    }
    stats[r] = sum_a / den - sum_b / den;
  }
  std::sort(stats.begin(), stats.end());

  const double alpha = 1.0 - level;
  ConfidenceInterval ci;
  ci.point = std::accumulate(a.begin(), a.end(), 0.0) / den -
             std::accumulate(b.begin(), b.end(), 0.0) / den;
  ci.lower = detail::sorted_quantile(stats, alpha / 2.0);
  ci.upper = detail::sorted_quantile(stats, 1.0 - alpha / 2.0);
  ci.level = level;
  ci.resamples = resamples;
  ci.seed = seed;
  return ci;
}

std::vector<double> to_doubles(std::span<const int> indicators) {
  std::vector<double> v(indicators.size());
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    v[i] = static_cast<double>(indicators[i]);
  }
  return v;
}

}  // namespace

ConfidenceInterval bootstrap_ci_rate(std::span<const int> indicators,
                                     double level, int resamples,
                                     std::uint64_t seed) {
  const std::vector<double> v = to_doubles(indicators);
  return percentile_bootstrap(v, {}, level, resamples, seed);
}

ConfidenceInterval bootstrap_ci_mean(std::span<const double> values,
                                     double level, int resamples,
                                     std::uint64_t seed) {
  return percentile_bootstrap(values, {}, level, resamples, seed);
}

ConfidenceInterval bootstrap_ci_paired_diff(std::span<const int> indicators_a,
                                            std::span<const int> indicators_b,
                                            double level, int resamples,
                                            std::uint64_t seed) {
  if (indicators_a.size() != indicators_b.size()) {
    throw ValidationError("paired difference requires equal-length vectors");
  }
  const std::vector<double> a = to_doubles(indicators_a);
  const std::vector<double> b = to_doubles(indicators_b);
  return percentile_bootstrap(a, b, level, resamples, seed);
}

bool intervals_disjoint(const ConfidenceInterval& a,
                        const ConfidenceInterval& b) {
  if (a.level != b.level) {
    throw ValidationError("cannot compare intervals at different levels");
  }
  return a.upper < b.lower || b.upper < a.lower;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("wilcoxon requires equal-length paired samples");
  }
  if (x.empty()) {
    throw ValidationError("wilcoxon requires at least one pair");
  }

  // Zero differences are dropped (Wilcoxon's original treatment).
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult res;
  res.n_effective = diffs.size();
  if (diffs.empty()) {
    res.p_value = 1.0;
    res.mode = WilcoxonMode::exact;
    return res;
  }

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(diffs[i]) < std::abs(diffs[j]);
  });

  // Midranks over tie groups of |d|.
  std::vector<double> rank(n, 0.0);
  bool has_ties = false;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double mid =
        (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) {
      has_ties = true;
      tie_term += t * t * t - t;
    }
    i = j + 1;
  }

  double w_plus = 0.0;
  double w_minus = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (diffs[k] > 0.0) {
      w_plus += rank[k];
    } else {
      w_minus += rank[k];
    }
  }
  res.w_plus = w_plus;
  res.w_minus = w_minus;

  if (n <= kWilcoxonExactLimit && !has_ties) {
    // Exact null distribution of W+ over all 2^n sign assignments, built by
    // the subset-sum recurrence over ranks 1..n.
    const std::size_t max_w = n * (n + 1) / 2;
    std::vector<std::uint64_t> count(max_w + 1, 0);
    count[0] = 1;
    for (std::size_t r = 1; r <= n; ++r) {
      for (std::size_t w = max_w + 1; w-- > r;) {
        count[w] += count[w - r];
      }
    }
    const auto w_int = static_cast<std::size_t>(std::llround(w_plus));
    std::uint64_t le = 0;
    std::uint64_t ge = 0;
    for (std::size_t w = 0; w <= max_w; ++w) {
      if (w <= w_int) le += count[w];
      if (w >= w_int) ge += count[w];
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    const double tail = static_cast<double>(std::min(le, ge));
    res.p_value = std::min(1.0, 2.0 * tail / total);
    res.mode = WilcoxonMode::exact;
  } else {
    res.p_value = detail::wilcoxon_normal_p(w_plus, n, tie_term);
    res.mode = WilcoxonMode::normal_approx;
  }
  return res;
}

}  // namespace cseval::stats
