#pragma once

/**
 * Completion-API client for fetching generations with top-k log-probabilities,
 * plus deterministic fixture replay for offline operation.
 *
 * The client speaks the chat-completions shape: POST {base_url}/v1/chat/completions
 * with {"model", "temperature", "logprobs": true, "top_logprobs": k,
 * "messages": [{"role": "user", "content": prompt}]} and reads the per-token
 * logprob content block of the response. The base URL is configurable so
 * tests can point it at a local stub server.
 *
 * Stored logprobs are exactly the provider-reported values; normalization
 * never rounds. When an archive directory is configured, the raw response
 * body is persisted verbatim per request for audit.
 */

#include <cstdint>
#include <filesystem>
#include <string>

#include "cseval/records.hpp"

namespace cseval::provider {

struct FetchSpec {
  std::string model_id = "gpt-4o-mini";
  double temperature = 0.0;
  int top_logprobs = 10;
  int max_tokens = 0;  // 0 = provider default
  std::string prompt_text;
  std::string prompt_id;
  records::Category category = records::Category::creative;
};

struct ClientOptions {
  std::string base_url = "https://api.openai.com";
  /// Environment variable holding the API credential. May be empty for
  /// credential-less stub servers.
  std::string api_key_env = "OPENAI_API_KEY";
  /// When true every fetch fails with NetworkError before any socket is
  /// opened. Replay is unaffected.
  bool offline = true;
  int max_attempts = 4;
  int initial_backoff_ms = 250;
  /// Empty disables raw-response archiving.
  std::filesystem::path archive_dir;
};

class Client {
public:
  explicit Client(ClientOptions options);

  const ClientOptions& options() const { return options_; }

  /// Fetches one generation. Throws NetworkError on transport failure after
  /// bounded retries (rate-limit responses honor Retry-After), and
  /// ValidationError when the response violates the record invariants or
  /// carries fewer than the requested top_logprobs.
  records::GenerationRecord fetch_generation(const FetchSpec& spec) const;

private:
  ClientOptions options_;
};

/// Converts one chat-completion response body into a validated record.
/// Exposed separately so stub-captured payloads can be normalized without a
/// client. Throws ValidationError on contract violations.
records::GenerationRecord normalize_response(const std::string& body,
                                             const FetchSpec& spec);

/// Replays a record file with zero network use. Identical to ingest_file.
records::IngestResult replay_fixture(const std::filesystem::path& path);

struct Prompt {
  std::string prompt_id;
  records::Category category = records::Category::creative;
  std::string text;
};

/// Parses a prompts file: "[category]" header lines open a block, each
/// following line is "prompt_id<TAB>prompt text". '#' lines and blank lines
/// are ignored. Throws ParseError on malformed lines.
std::vector<Prompt> load_prompts(const std::filesystem::path& path);

}  // namespace cseval::provider
