#include "cseval/records.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "cseval/errors.hpp"

using nlohmann::json;

namespace cseval::records {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::creative: return "creative";
    case Category::easy: return "easy";
    case Category::medium: return "medium";
    case Category::hard: return "hard";
  }
  return "creative";
}

std::optional<Category> category_from_string(std::string_view s) {
  if (s == "creative") return Category::creative;
  if (s == "easy") return Category::easy;
  if (s == "medium") return Category::medium;
  if (s == "hard") return Category::hard;
  return std::nullopt;
}

Probabilities probabilities(const TokenObservation& obs) {
  Probabilities p;
  p.chosen = std::exp(obs.chosen_logprob);
  p.top.reserve(obs.top_alternatives.size());
  for (const auto& alt : obs.top_alternatives) {
    p.top.push_back(std::exp(alt.logprob));
  }
  return p;
}

std::optional<std::string> violation(const TokenObservation& obs) {
  if (obs.chosen_logprob > 0.0 || std::isnan(obs.chosen_logprob)) {
    return "logprob must be <= 0, got " + std::to_string(obs.chosen_logprob);
  }
  for (std::size_t i = 0; i < obs.top_alternatives.size(); ++i) {
    const double lp = obs.top_alternatives[i].logprob;
    if (lp > 0.0 || std::isnan(lp)) {
      return "top_logprobs[" + std::to_string(i) +
             "].logprob must be <= 0, got " + std::to_string(lp);
    }
    if (i > 0 && lp > obs.top_alternatives[i - 1].logprob) {
      return "top_logprobs not sorted non-increasing at index " +
             std::to_string(i);
    }
  }
  if (!obs.top_alternatives.empty() &&
      obs.chosen_logprob > obs.top_alternatives[0].logprob + kRankEpsilon) {
    return "chosen logprob exceeds the rank-1 alternative";
  }
  return std::nullopt;
}

std::optional<std::string> violation(const GenerationRecord& rec) {
  if (rec.tokens.empty()) {
    return "record has no tokens";
  }
  if (rec.temperature < 0.0 || std::isnan(rec.temperature)) {
    return "temperature must be >= 0";
  }
  for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
    if (auto why = violation(rec.tokens[t])) {
      return "tokens[" + std::to_string(t) + "]: " + *why;
    }
  }
  return std::nullopt;
}

Corpus Corpus::from_records(std::vector<GenerationRecord> recs) {
  Corpus c;
  c.records_ = std::move(recs);
  for (std::size_t i = 0; i < c.records_.size(); ++i) {
    const auto& r = c.records_[i];
    auto [it, inserted] =
        c.index_.emplace(std::make_pair(r.prompt_id, r.temperature), i);
    if (!inserted) {
      throw ValidationError("duplicate record for prompt_id '" + r.prompt_id +
                            "' at temperature " +
                            std::to_string(r.temperature));
    }
  }
  return c;
}

const GenerationRecord* Corpus::find(std::string_view prompt_id,
                                     double temperature) const {
  auto it = index_.find(std::make_pair(std::string(prompt_id), temperature));
  if (it == index_.end()) return nullptr;
  return &records_[it->second];
}

namespace {

const json& require_field(const json& obj, const char* key,
                          std::size_t line_number) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(line_number, std::string("missing field '") + key + "'");
  }
  return *it;
}

double require_number(const json& obj, const char* key,
                      std::size_t line_number) {
  const json& v = require_field(obj, key, line_number);
  if (!v.is_number()) {
    throw ParseError(line_number,
                     std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

std::string require_string(const json& obj, const char* key,
                           std::size_t line_number) {
  const json& v = require_field(obj, key, line_number);
  if (!v.is_string()) {
    throw ParseError(line_number,
                     std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

GenerationRecord parse_record_line(std::string_view line,
                                   std::size_t line_number) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError(line_number, "malformed record (not a JSON object)");
  }

  GenerationRecord rec;
  rec.prompt_id = require_string(j, "prompt_id", line_number);
  rec.model_id = require_string(j, "model_id", line_number);
  rec.temperature = require_number(j, "temperature", line_number);

  const std::string cat = require_string(j, "category", line_number);
  if (auto c = category_from_string(cat)) {
    rec.category = *c;
  } else {
    // A data problem, not a syntax problem: the caller rejects this record
    // and keeps ingesting.
    throw ValidationError("record '" + rec.prompt_id + "': unknown category '" +
                          cat + "'");
  }

  const json& tokens = require_field(j, "tokens", line_number);
  if (!tokens.is_array()) {
    throw ParseError(line_number, "field 'tokens' must be an array");
  }
  rec.tokens.reserve(tokens.size());
  for (const json& tok : tokens) {
    if (!tok.is_object()) {
      throw ParseError(line_number, "token entries must be objects");
    }
    TokenObservation obs;
    obs.token = require_string(tok, "token", line_number);
    obs.chosen_logprob = require_number(tok, "logprob", line_number);
    const json& alts = require_field(tok, "top_logprobs", line_number);
    if (!alts.is_array()) {
      throw ParseError(line_number, "field 'top_logprobs' must be an array");
    }
    obs.top_alternatives.reserve(alts.size());
    for (const json& alt : alts) {
      if (!alt.is_object()) {
        throw ParseError(line_number, "top_logprobs entries must be objects");
      }
      obs.top_alternatives.push_back(
          {require_string(alt, "token", line_number),
           require_number(alt, "logprob", line_number)});
    }
    rec.tokens.push_back(std::move(obs));
  }
  return rec;
}

IngestResult ingest_records(std::istream& in) {
  IngestResult result;
  std::vector<GenerationRecord> accepted;
  std::map<std::pair<std::string, double>, std::size_t> seen;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;

    GenerationRecord rec;
    try {
      rec = parse_record_line(line, line_number);
    } catch (const ValidationError& e) {
      // Data-level problem inside a structurally sound line.
      result.rejected.push_back({line_number, "", e.what()});
      continue;
    }

    if (auto why = violation(rec)) {
      result.rejected.push_back({line_number, rec.prompt_id, *why});
      continue;
    }

    auto key = std::make_pair(rec.prompt_id, rec.temperature);
    if (auto it = seen.find(key); it != seen.end()) {
      throw ValidationError(
          "line " + std::to_string(line_number) +
          ": duplicate (prompt_id, temperature) = ('" + rec.prompt_id + "', " +
          std::to_string(rec.temperature) + "), first seen on line " +
          std::to_string(it->second));
    }
    seen.emplace(std::move(key), line_number);
    accepted.push_back(std::move(rec));
  }

  result.accepted = accepted.size();
  result.corpus = Corpus::from_records(std::move(accepted));
  return result;
}

IngestResult ingest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open record file: " + path.string());
  }
  return ingest_records(in);
}

std::string to_json_line(const GenerationRecord& rec) {
  json tokens = json::array();
  for (const auto& obs : rec.tokens) {
    json alts = json::array();
    for (const auto& alt : obs.top_alternatives) {
      alts.push_back({{"token", alt.token}, {"logprob", alt.logprob}});
    }
    tokens.push_back({{"token", obs.token},
                      {"logprob", obs.chosen_logprob},
                      {"top_logprobs", std::move(alts)}});
  }
  json j{{"prompt_id", rec.prompt_id},
         {"category", std::string(to_string(rec.category))},
         {"temperature", rec.temperature},
         {"model_id", rec.model_id},
         {"tokens", std::move(tokens)}};
  return j.dump();
}

void write_records(const Corpus& corpus, std::ostream& out) {
  for (const auto& rec : corpus.all()) {
    out << to_json_line(rec) << '\n';
  }
}

}  // namespace cseval::records
