#pragma once

/**
 * Report emission: markdown and CSV tables shaped like the experiment
 * summaries, plus a machine-readable JSON results file carrying every
 * indicator, score, interval, seed, and p-value.
 *
 * Output is deterministic: identical results produce identical bytes.
 * Percentages are rendered to one decimal, scores to three.
 */

#include <string>

#include "cseval/experiments.hpp"

namespace cseval::report {

enum class Format { markdown, csv };

/// Parses "markdown"/"md" or "csv". Throws ValidationError otherwise.
Format format_from_string(std::string_view s);

std::string render_experiment1(const harness::Experiment1Result& result,
                               Format format, std::string_view input_name);
std::string render_experiment2(const harness::Experiment2Result& result,
                               Format format, std::string_view input_name);

std::string results_json_experiment1(const harness::Experiment1Result& result,
                                     std::string_view input_name);
std::string results_json_experiment2(const harness::Experiment2Result& result,
                                     std::string_view input_name);

}  // namespace cseval::report
