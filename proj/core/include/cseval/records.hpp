#pragma once

/**
 * Token log-probability data model and record-file ingestion.
 *
 * The on-disk format is newline-delimited JSON, one generation per line:
 *
 *   {"prompt_id": "...", "category": "creative|easy|medium|hard",
 *    "temperature": 1.1, "model_id": "...",
 *    "tokens": [{"token": "...", "logprob": -0.1,
 *                "top_logprobs": [{"token": "...", "logprob": -0.1}, ...]}]}
 *
 * The token payload deliberately mirrors the logprob block of mainstream
 * chat-completion APIs so captured responses convert with a thin adapter.
 *
 * Error policy for ingestion:
 *  - broken JSON or missing/mistyped fields      -> ParseError (hard, with line)
 *  - invariant violations (positive logprob,
 *    unsorted alternatives, empty token list,
 *    unknown category, negative temperature)     -> record rejected, ingestion
 *                                                   continues, diagnostic kept
 *  - duplicate (prompt_id, temperature)          -> ValidationError (hard)
 */

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cseval::records {

enum class Category { creative, easy, medium, hard };

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

/// Tolerance on the chosen-vs-rank-1 ordering check. Providers round the two
/// logprobs independently, so exact equality cannot be required.
inline constexpr double kRankEpsilon = 1e-9;

struct TokenAlternative {
  std::string token;
  double logprob = 0.0;

  bool operator==(const TokenAlternative&) const = default;
};

/// One generated token: its own log-probability plus the provider's ranked
/// top-k alternatives (non-increasing by logprob).
struct TokenObservation {
  std::string token;
  double chosen_logprob = 0.0;
  std::vector<TokenAlternative> top_alternatives;

  bool operator==(const TokenObservation&) const = default;
};

struct Probabilities {
  double chosen = 0.0;
  std::vector<double> top;
};

/// Converts an observation from log space to probability space. Order is
/// preserved and no renormalization is applied; the provider's raw
/// probabilities are the population of interest even though they sum to < 1.
Probabilities probabilities(const TokenObservation& obs);

/// One model response.
struct GenerationRecord {
  std::string prompt_id;
  Category category = Category::creative;
  double temperature = 0.0;
  std::string model_id;
  std::vector<TokenObservation> tokens;

  bool operator==(const GenerationRecord&) const = default;
};

/// Returns a human-readable reason if the observation violates an invariant.
std::optional<std::string> violation(const TokenObservation& obs);
/// Returns a human-readable reason if the record violates an invariant.
std::optional<std::string> violation(const GenerationRecord& rec);

/// An immutable, validated set of generation records indexed by
/// (prompt_id, temperature). Safe for unrestricted concurrent reads.
class Corpus {
public:
  Corpus() = default;

  /// Builds a corpus from validated records. Throws ValidationError on a
  /// duplicate (prompt_id, temperature) pair.
  static Corpus from_records(std::vector<GenerationRecord> recs);

  const std::vector<GenerationRecord>& all() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Looks up a record by key; nullptr if absent.
  const GenerationRecord* find(std::string_view prompt_id,
                               double temperature) const;

  bool operator==(const Corpus& other) const {
    return records_ == other.records_;
  }

private:
  std::vector<GenerationRecord> records_;
  std::map<std::pair<std::string, double>, std::size_t> index_;
};

struct Rejection {
  std::size_t line = 0;  // 1-based line in the source stream
  std::string prompt_id;
  std::string reason;
};

struct IngestResult {
  Corpus corpus;
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
};

/// Parses one record line. Throws ParseError on structural problems; returns
/// the parsed record without invariant checks (the caller validates).
GenerationRecord parse_record_line(std::string_view line,
                                   std::size_t line_number);

IngestResult ingest_records(std::istream& in);
IngestResult ingest_file(const std::filesystem::path& path);

/// Canonical single-line JSON serialization. Doubles round-trip exactly.
std::string to_json_line(const GenerationRecord& rec);
void write_records(const Corpus& corpus, std::ostream& out);

}  // namespace cseval::records
