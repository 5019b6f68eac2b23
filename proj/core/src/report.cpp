#include "cseval/report.hpp"

#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cseval/errors.hpp"

using ordered_json = nlohmann::ordered_json;

namespace cseval::report {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Percentages to one decimal, scores to three.
std::string pct(double fraction) { return fmt("%.1f", fraction * 100.0) + "%"; }
std::string pct_signed(double fraction) {
  return fmt("%+.1f", fraction * 100.0) + "%";
}
std::string score3(double v) { return fmt("%.3f", v); }
std::string num(double v) { return fmt("%g", v); }

std::string rate_cell(const stats::ConfidenceInterval& ci) {
  return pct(ci.point) + " (" + pct(ci.lower) + ", " + pct(ci.upper) + ")";
}

std::string mean_cell(const stats::ConfidenceInterval& ci) {
  return score3(ci.point) + " (" + score3(ci.lower) + ", " + score3(ci.upper) +
         ")";
}

std::string comparison_label(const harness::RateDifference& d) {
  std::string label(harness::metric_display(d.confidence_metric));
  label += " vs ";
  label += d.baseline == harness::Metric::perplexity ? "PPL" : "Fluency";
  return label;
}

const char* mode_name(stats::WilcoxonMode m) {
  return m == stats::WilcoxonMode::exact ? "exact" : "normal_approx";
}

std::string category_display(records::Category c) {
  switch (c) {
    case records::Category::creative: return "Creative";
    case records::Category::easy: return "Easy";
    case records::Category::medium: return "Medium";
    case records::Category::hard: return "Hard";
  }
  return "Creative";
}

std::string wilcoxon_p(const stats::WilcoxonResult& w) {
  if (w.degenerate()) return "1 (degenerate)";
  return fmt("%.3g", w.p_value);
}

}  // namespace

Format format_from_string(std::string_view s) {
  if (s == "markdown" || s == "md") return Format::markdown;
  if (s == "csv") return Format::csv;
  throw ValidationError("unknown report format '" + std::string(s) +
                        "' (expected markdown or csv)");
}

std::string render_experiment1(const harness::Experiment1Result& r,
                               Format format, std::string_view input_name) {
  std::ostringstream out;
  const std::size_t n = r.table.rows.size();

  if (format == Format::markdown) {
    out << "# Creativity preference analysis\n\n";
    out << "Preference rates for high-temperature (T=" << num(r.high_temperature)
        << ") responses over " << n << " prompt pairs (low T="
        << num(r.low_temperature) << ").\n\n";
    out << "| Metric | Preference rate (95% CI) |\n";
    out << "|---|---|\n";
    for (std::size_t m = 0; m < 4; ++m) {
      out << "| " << harness::metric_display(harness::kAllMetrics[m]) << " | "
          << rate_cell(r.table.rates[m]) << " |\n";
    }
    out << "\n";
    out << "| Comparison | Mean diff. (95% CI) |\n";
    out << "|---|---|\n";
    for (const auto& d : r.differences) {
      out << "| " << comparison_label(d) << " | " << pct_signed(d.ci.point)
          << " (" << pct(d.ci.lower) << ", " << pct(d.ci.upper) << ") |\n";
    }
    out << "\n";
    out << "| Metric | n_eff | W+ | W- | p (two-sided) | mode |\n";
    out << "|---|---|---|---|---|---|\n";
    for (std::size_t m = 0; m < 4; ++m) {
      const auto& w = r.wilcoxon[m];
      out << "| " << harness::metric_display(harness::kAllMetrics[m]) << " | "
          << w.n_effective << " | " << num(w.w_plus) << " | " << num(w.w_minus)
          << " | " << wilcoxon_p(w) << " | " << mode_name(w.mode) << " |\n";
    }
    out << "\n";
    out << "_seed=" << r.bootstrap.seed << ", resamples="
        << r.bootstrap.resamples << ", level=" << num(r.bootstrap.level)
        << ", top_n=" << r.config.top_n << ", low_temp="
        << num(r.low_temperature) << ", high_temp=" << num(r.high_temperature)
        << ", input=" << input_name << "_\n";
    return out.str();
  }

  out << "# preference rates\n";
  out << "metric,rate_pct,ci_lower_pct,ci_upper_pct\n";
  for (std::size_t m = 0; m < 4; ++m) {
    const auto& ci = r.table.rates[m];
    out << harness::metric_key(harness::kAllMetrics[m]) << ","
        << fmt("%.1f", ci.point * 100.0) << "," << fmt("%.1f", ci.lower * 100.0)
        << "," << fmt("%.1f", ci.upper * 100.0) << "\n";
  }
  out << "# rate differences\n";
  out << "comparison,diff_pct,ci_lower_pct,ci_upper_pct\n";
  for (const auto& d : r.differences) {
    out << harness::metric_key(d.confidence_metric) << "_vs_"
        << harness::metric_key(d.baseline) << ","
        << fmt("%+.1f", d.ci.point * 100.0) << ","
        << fmt("%.1f", d.ci.lower * 100.0) << ","
        << fmt("%.1f", d.ci.upper * 100.0) << "\n";
  }
  out << "# wilcoxon\n";
  out << "metric,n_effective,w_plus,w_minus,p_value,mode\n";
  for (std::size_t m = 0; m < 4; ++m) {
    const auto& w = r.wilcoxon[m];
    out << harness::metric_key(harness::kAllMetrics[m]) << ","
        << w.n_effective << "," << num(w.w_plus) << "," << num(w.w_minus)
        << "," << fmt("%.6g", w.p_value) << "," << mode_name(w.mode) << "\n";
  }
  out << "# config\n";
  out << "seed,resamples,level,top_n,low_temperature,high_temperature,input\n";
  out << r.bootstrap.seed << "," << r.bootstrap.resamples << ","
      << num(r.bootstrap.level) << "," << r.config.top_n << ","
      << num(r.low_temperature) << "," << num(r.high_temperature) << ","
      << input_name << "\n";
  return out.str();
}

std::string render_experiment2(const harness::Experiment2Result& r,
                               Format format, std::string_view input_name) {
  std::ostringstream out;

  if (format == Format::markdown) {
    out << "# Difficulty separation analysis\n\n";
    out << "Mean scores with bootstrapped 95% CIs at T=" << num(r.temperature)
        << " (";
    for (std::size_t c = 0; c < 3; ++c) {
      if (c) out << ", ";
      out << category_display(harness::kDifficultyCategories[c]) << ": "
          << r.category_counts[c];
    }
    out << " prompts).\n\n";
    out << "| Category | Metric | Mean (95% CI) |\n";
    out << "|---|---|---|\n";
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t m = 0; m < 4; ++m) {
        out << "| " << category_display(harness::kDifficultyCategories[c])
            << " | " << harness::metric_display(harness::kAllMetrics[m])
            << " | " << mean_cell(r.cells[c][m]) << " |\n";
      }
    }
    out << "\n";
    out << "| Metric | Easy vs Medium | Easy vs Hard | Medium vs Hard |\n";
    out << "|---|---|---|---|\n";
    for (std::size_t m = 0; m < 4; ++m) {
      out << "| " << harness::metric_display(harness::kAllMetrics[m]);
      for (std::size_t p = 0; p < 3; ++p) {
        out << " | " << (r.disjoint[m][p] ? "disjoint" : "OVERLAP");
      }
      out << " |\n";
    }
    out << "\n";
    out << (r.all_disjoint
                ? "All category intervals are mutually disjoint.\n"
                : "WARNING: at least one pair of category intervals overlaps.\n");
    out << "\n_seed=" << r.bootstrap.seed << ", resamples="
        << r.bootstrap.resamples << ", level=" << num(r.bootstrap.level)
        << ", top_n=" << r.config.top_n << ", temp=" << num(r.temperature)
        << ", input=" << input_name << "_\n";
    return out.str();
  }

  out << "# category means\n";
  out << "category,metric,mean,ci_lower,ci_upper\n";
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t m = 0; m < 4; ++m) {
      const auto& ci = r.cells[c][m];
      out << records::to_string(harness::kDifficultyCategories[c]) << ","
          << harness::metric_key(harness::kAllMetrics[m]) << ","
          << score3(ci.point) << "," << score3(ci.lower) << ","
          << score3(ci.upper) << "\n";
    }
  }
  out << "# pairwise disjoint\n";
  out << "metric,easy_vs_medium,easy_vs_hard,medium_vs_hard\n";
  for (std::size_t m = 0; m < 4; ++m) {
    out << harness::metric_key(harness::kAllMetrics[m]);
    for (std::size_t p = 0; p < 3; ++p) {
      out << "," << (r.disjoint[m][p] ? "true" : "false");
    }
    out << "\n";
  }
  out << "# config\n";
  out << "seed,resamples,level,top_n,temperature,input\n";
  out << r.bootstrap.seed << "," << r.bootstrap.resamples << ","
      << num(r.bootstrap.level) << "," << r.config.top_n << ","
      << num(r.temperature) << "," << input_name << "\n";
  return out.str();
}

namespace {

ordered_json ci_json(const stats::ConfidenceInterval& ci) {
  return ordered_json{{"point", ci.point},   {"lower", ci.lower},
                      {"upper", ci.upper},   {"level", ci.level},
                      {"resamples", ci.resamples}, {"seed", ci.seed}};
}

ordered_json wilcoxon_json(const stats::WilcoxonResult& w) {
  return ordered_json{{"n_effective", w.n_effective},
                      {"w_plus", w.w_plus},
                      {"w_minus", w.w_minus},
                      {"p_value", w.p_value},
                      {"mode", mode_name(w.mode)},
                      {"degenerate", w.degenerate()}};
}

}  // namespace

std::string results_json_experiment1(const harness::Experiment1Result& r,
                                     std::string_view input_name) {
  ordered_json j;
  j["experiment"] = 1;
  j["config"] = ordered_json{{"input", std::string(input_name)},
                             {"top_n", r.config.top_n},
                             {"low_temperature", r.low_temperature},
                             {"high_temperature", r.high_temperature},
                             {"level", r.bootstrap.level},
                             {"resamples", r.bootstrap.resamples},
                             {"seed", r.bootstrap.seed}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.table.rows) {
    ordered_json jr;
    jr["prompt_id"] = row.prompt_id;
    for (std::size_t m = 0; m < 4; ++m) {
      const auto key = std::string(harness::metric_key(harness::kAllMetrics[m]));
      jr["low"][key] = row.low[m];
      jr["high"][key] = row.high[m];
      jr["prefers_high"][key] = row.prefers[m];
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  for (std::size_t m = 0; m < 4; ++m) {
    const auto key = std::string(harness::metric_key(harness::kAllMetrics[m]));
    j["preference_rates"][key] = ci_json(r.table.rates[m]);
    j["wilcoxon"][key] = wilcoxon_json(r.wilcoxon[m]);
  }
  ordered_json diffs = ordered_json::array();
  for (const auto& d : r.differences) {
    ordered_json jd;
    jd["confidence_metric"] =
        std::string(harness::metric_key(d.confidence_metric));
    jd["baseline"] = std::string(harness::metric_key(d.baseline));
    jd["ci"] = ci_json(d.ci);
    diffs.push_back(std::move(jd));
  }
  j["rate_differences"] = std::move(diffs);
  return j.dump(2) + "\n";
}

std::string results_json_experiment2(const harness::Experiment2Result& r,
                                     std::string_view input_name) {
  ordered_json j;
  j["experiment"] = 2;
  j["config"] = ordered_json{{"input", std::string(input_name)},
                             {"top_n", r.config.top_n},
                             {"temperature", r.temperature},
                             {"level", r.bootstrap.level},
                             {"resamples", r.bootstrap.resamples},
                             {"seed", r.bootstrap.seed}};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto cat =
        std::string(records::to_string(harness::kDifficultyCategories[c]));
    j["category_counts"][cat] = r.category_counts[c];
    for (std::size_t m = 0; m < 4; ++m) {
      const auto key =
          std::string(harness::metric_key(harness::kAllMetrics[m]));
      j["means"][cat][key] = ci_json(r.cells[c][m]);
    }
  }
  for (std::size_t m = 0; m < 4; ++m) {
    const auto key = std::string(harness::metric_key(harness::kAllMetrics[m]));
    const char* pair_names[3] = {"easy_vs_medium", "easy_vs_hard",
                                 "medium_vs_hard"};
    for (std::size_t p = 0; p < 3; ++p) {
      j["disjoint"][key][pair_names[p]] = r.disjoint[m][p];
    }
  }
  j["all_disjoint"] = r.all_disjoint;
  return j.dump(2) + "\n";
}

}  // namespace cseval::report
