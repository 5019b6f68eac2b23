#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "cseval/provider.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "cseval/errors.hpp"

using nlohmann::json;

namespace cseval::provider {

namespace {

std::string sanitize_for_filename(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

void archive_raw_response(const ClientOptions& opts, const FetchSpec& spec,
                          const std::string& body) {
  if (opts.archive_dir.empty()) return;
  std::filesystem::create_directories(opts.archive_dir);
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  char name[256];
  std::snprintf(name, sizeof(name), "%s_T%g_%lld.json",
                sanitize_for_filename(spec.prompt_id).c_str(),
                spec.temperature, static_cast<long long>(now));
  std::ofstream out(opts.archive_dir / name, std::ios::binary);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

}  // namespace

Client::Client(ClientOptions options) : options_(std::move(options)) {}

records::GenerationRecord normalize_response(const std::string& body,
                                             const FetchSpec& spec) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationError("provider response is not a JSON object");
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw ValidationError("provider response has no choices");
  }
  const json& choice = (*choices)[0];
  const auto logprobs = choice.find("logprobs");
  if (logprobs == choice.end() || !logprobs->is_object()) {
    throw ValidationError(
        "provider response carries no logprobs (was logprobs=true set?)");
  }
  const auto content = logprobs->find("content");
  if (content == logprobs->end() || !content->is_array()) {
    throw ValidationError("provider logprobs carry no content array");
  }

  records::GenerationRecord rec;
  rec.prompt_id = spec.prompt_id;
  rec.category = spec.category;
  rec.temperature = spec.temperature;
  rec.model_id = j.contains("model") && j["model"].is_string()
                     ? j["model"].get<std::string>()
                     : spec.model_id;

  std::size_t index = 0;
  for (const json& tok : *content) {
    records::TokenObservation obs;
    obs.token = tok.value("token", std::string());
    if (!tok.contains("logprob") || !tok["logprob"].is_number()) {
      throw ValidationError("token " + std::to_string(index) +
                            " has no logprob");
    }
    obs.chosen_logprob = tok["logprob"].get<double>();
    const auto alts = tok.find("top_logprobs");
    if (alts == tok.end() || !alts->is_array()) {
      throw ValidationError("token " + std::to_string(index) +
                            " has no top_logprobs");
    }
    if (alts->size() < static_cast<std::size_t>(spec.top_logprobs)) {
      throw ValidationError(
          "token " + std::to_string(index) + " carries " +
          std::to_string(alts->size()) + " top_logprobs, requested " +
          std::to_string(spec.top_logprobs));
    }
    // Values are taken exactly as reported; no rounding, no reordering.
    for (const json& alt : *alts) {
      if (!alt.contains("logprob") || !alt["logprob"].is_number()) {
        throw ValidationError("token " + std::to_string(index) +
                              " has a top_logprobs entry without a logprob");
      }
      obs.top_alternatives.push_back(
          {alt.value("token", std::string()), alt["logprob"].get<double>()});
    }
    rec.tokens.push_back(std::move(obs));
    ++index;
  }

  if (auto why = records::violation(rec)) {
    throw ValidationError("provider record for '" + spec.prompt_id +
                          "' violates invariants: " + *why);
  }
  return rec;
}

records::GenerationRecord Client::fetch_generation(
    const FetchSpec& spec) const {
  if (options_.offline) {
    throw NetworkError(
        "network mode is disabled; use replay_fixture for offline runs");
  }

  json payload{{"model", spec.model_id},
               {"temperature", spec.temperature},
               {"logprobs", true},
               {"top_logprobs", spec.top_logprobs},
               {"messages",
                json::array({{{"role", "user"}, {"content", spec.prompt_text}}})}};
  if (spec.max_tokens > 0) payload["max_tokens"] = spec.max_tokens;
  const std::string body = payload.dump();

  std::string api_key;
  if (!options_.api_key_env.empty()) {
    if (const char* v = std::getenv(options_.api_key_env.c_str())) {
      api_key = v;
    }
  }

  httplib::Client http(options_.base_url);
  http.set_connection_timeout(30);
  http.set_read_timeout(120);
  httplib::Headers headers;
  if (!api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key);
  }

  int backoff_ms = options_.initial_backoff_ms;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    auto res = http.Post("/v1/chat/completions", headers, body,
                         "application/json");
    if (res) {
      if (res->status == 200) {
        archive_raw_response(options_, spec, res->body);
        return normalize_response(res->body, spec);
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        int wait_ms = backoff_ms;
        if (res->has_header("Retry-After")) {
          // Provider backoff signal wins over our own schedule.
          const auto secs = std::atoi(res->get_header_value("Retry-After").c_str());
          if (secs > 0) wait_ms = secs * 1000;
        }
        if (attempt < options_.max_attempts) {
          std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
          backoff_ms *= 2;
        }
        continue;
      }
      throw NetworkError("provider rejected request for '" + spec.prompt_id +
                         "': HTTP " + std::to_string(res->status) + " " +
                         res->body);
    }
    last_error = httplib::to_string(res.error());
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
  }
  throw NetworkError("fetch for '" + spec.prompt_id + "' failed after " +
                     std::to_string(options_.max_attempts) +
                     " attempts: " + last_error);
}

records::IngestResult replay_fixture(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("fixture file does not exist: " + path.string());
  }
  return records::ingest_file(path);
}

std::vector<Prompt> load_prompts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open prompts file: " + path.string());
  }
  std::vector<Prompt> prompts;
  records::Category current = records::Category::creative;
  bool have_category = false;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      const auto name = line.substr(1, line.size() - 2);
      const auto cat = records::category_from_string(name);
      if (!cat) {
        throw ParseError(line_number, "unknown category header '" + name + "'");
      }
      current = *cat;
      have_category = true;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(line_number,
                       "expected 'prompt_id<TAB>prompt text' or '[category]'");
    }
    if (!have_category) {
      throw ParseError(line_number,
                       "prompt line before any [category] header");
    }
    prompts.push_back(
        {line.substr(0, tab), current, line.substr(tab + 1)});
  }
  return prompts;
}

}  // namespace cseval::provider
