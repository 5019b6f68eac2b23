// cseval: reference-free scoring of LLM generations from per-token
// log-probability records, plus the two statistical experiments and a
// fetch client for building record files against a completion API.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "cseval/errors.hpp"
#include "cseval/experiments.hpp"
#include "cseval/metrics.hpp"
#include "cseval/provider.hpp"
#include "cseval/records.hpp"
#include "cseval/report.hpp"

namespace {

// Exit codes, kept distinct so scripts can tell failure classes apart.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIngest = 2;
constexpr int kExitPartial = 3;
constexpr int kExitNetwork = 4;

void write_artifact(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw cseval::ValidationError("cannot write output file: " + path);
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct ScoreArgs {
  std::string input;
  std::string output = "-";
  int top_n = 3;
};

int run_score(const ScoreArgs& args) {
  cseval::records::IngestResult ingest;
  try {
    ingest = cseval::records::ingest_file(args.input);
  } catch (const cseval::Error& e) {
    std::cerr << "ingestion failed: " << e.what() << "\n";
    return kExitIngest;
  }
  for (const auto& rej : ingest.rejected) {
    std::cerr << "rejected line " << rej.line << ": " << rej.reason << "\n";
  }

  const cseval::metrics::MetricConfig cfg{args.top_n};

  // Stable output order regardless of file order.
  std::vector<const cseval::records::GenerationRecord*> order;
  order.reserve(ingest.corpus.size());
  for (const auto& rec : ingest.corpus.all()) order.push_back(&rec);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return std::tie(a->prompt_id, a->temperature) <
           std::tie(b->prompt_id, b->temperature);
  });

  std::ostringstream out;
  out << "# cseval score top_n=" << args.top_n << " input=" << args.input
      << "\n";
  out << "prompt_id,category,temperature,model_id,n_tokens,perplexity,"
         "fluency,avg_cs,wc_cs\n";
  std::size_t failures = 0;
  for (const auto* rec : order) {
    try {
      const auto s = cseval::metrics::score_sequence(*rec, cfg);
      out << rec->prompt_id << ","
          << cseval::records::to_string(rec->category) << ","
          << fmt_double(rec->temperature) << "," << rec->model_id << ","
          << rec->tokens.size() << "," << fmt_double(s.perplexity) << ","
          << fmt_double(s.fluency) << "," << fmt_double(s.avg_cs) << ","
          << fmt_double(s.wc_cs) << "\n";
    } catch (const cseval::ScoringError& e) {
      std::cerr << "scoring failed: " << e.what() << "\n";
      ++failures;
    }
  }
  write_artifact(args.output, out.str());
  std::cerr << "scored " << (order.size() - failures) << "/" << order.size()
            << " records (" << ingest.rejected.size()
            << " rejected at ingestion)\n";
  if (failures > 0 || !ingest.rejected.empty()) return kExitPartial;
  return kExitOk;
}

struct ExperimentArgs {
  std::string input;
  std::string report_path = "-";
  std::string results_path;
  std::string format = "markdown";
  int top_n = 3;
  int resamples = 10000;
  std::uint64_t seed = 42;
  double level = 0.95;
  double low_temp = 0.1;
  double high_temp = 1.1;
  double temp = 0.5;
};

int run_exp(const ExperimentArgs& args, bool experiment1) {
  cseval::records::IngestResult ingest;
  try {
    ingest = cseval::records::ingest_file(args.input);
  } catch (const cseval::Error& e) {
    std::cerr << "ingestion failed: " << e.what() << "\n";
    return kExitIngest;
  }
  for (const auto& rej : ingest.rejected) {
    std::cerr << "rejected line " << rej.line << ": " << rej.reason << "\n";
  }

  const cseval::metrics::MetricConfig cfg{args.top_n};
  const cseval::harness::BootstrapParams boot{args.level, args.resamples,
                                              args.seed};
  const auto format = cseval::report::format_from_string(args.format);

  std::string report;
  std::string results;
  if (experiment1) {
    const auto res = cseval::harness::run_experiment1(
        ingest.corpus, cfg, boot, args.low_temp, args.high_temp);
    report = cseval::report::render_experiment1(res, format, args.input);
    results = cseval::report::results_json_experiment1(res, args.input);
  } else {
    const auto res =
        cseval::harness::run_experiment2(ingest.corpus, cfg, boot, args.temp);
    report = cseval::report::render_experiment2(res, format, args.input);
    results = cseval::report::results_json_experiment2(res, args.input);
  }
  write_artifact(args.report_path, report);
  if (!args.results_path.empty()) {
    write_artifact(args.results_path, results);
  }
  return ingest.rejected.empty() ? kExitOk : kExitPartial;
}

struct FetchArgs {
  std::string prompts_path;
  std::string out_path = "records.jsonl";
  std::string model = "gpt-4o-mini";
  std::vector<double> temps = {0.1, 1.1};
  std::string base_url = "https://api.openai.com";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string archive_dir;
  int top_logprobs = 10;
  int max_tokens = 0;
  int jobs = 4;
  int max_attempts = 4;
  int backoff_ms = 250;
  bool offline = false;
};

int run_fetch(const FetchArgs& args) {
  std::vector<cseval::provider::Prompt> prompts;
  try {
    prompts = cseval::provider::load_prompts(args.prompts_path);
  } catch (const cseval::Error& e) {
    std::cerr << "cannot load prompts: " << e.what() << "\n";
    return kExitIngest;
  }

  // Resume support: any (prompt_id, temperature) already present in the
  // output file is skipped.
  std::set<std::pair<std::string, double>> done;
  {
    std::ifstream existing(args.out_path);
    std::string line;
    std::size_t line_number = 0;
    while (existing && std::getline(existing, line)) {
      ++line_number;
      if (line.empty()) continue;
      try {
        const auto rec = cseval::records::parse_record_line(line, line_number);
        done.emplace(rec.prompt_id, rec.temperature);
      } catch (const cseval::Error&) {
        std::cerr << "warning: unreadable line " << line_number
                  << " in existing output, ignoring\n";
      }
    }
  }

  cseval::provider::ClientOptions opts;
  opts.base_url = args.base_url;
  opts.api_key_env = args.api_key_env;
  opts.offline = args.offline;
  opts.max_attempts = args.max_attempts;
  opts.initial_backoff_ms = args.backoff_ms;
  if (!args.archive_dir.empty()) opts.archive_dir = args.archive_dir;
  const cseval::provider::Client client(opts);

  std::vector<cseval::provider::FetchSpec> work;
  std::size_t skipped = 0;
  for (const auto& prompt : prompts) {
    for (double t : args.temps) {
      if (done.count({prompt.prompt_id, t})) {
        ++skipped;
        continue;
      }
      cseval::provider::FetchSpec spec;
      spec.model_id = args.model;
      spec.temperature = t;
      spec.top_logprobs = args.top_logprobs;
      spec.max_tokens = args.max_tokens;
      spec.prompt_text = prompt.text;
      spec.prompt_id = prompt.prompt_id;
      spec.category = prompt.category;
      work.push_back(std::move(spec));
    }
  }

  std::ofstream out(args.out_path, std::ios::app | std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output file: " << args.out_path << "\n";
    return kExitIngest;
  }

  std::mutex appender_mutex;  // whole lines only, never interleaved
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> fetched{0};
  std::atomic<std::size_t> rejected{0};
  std::atomic<bool> aborted{false};
  std::string network_error;

  auto worker = [&] {
    while (!aborted.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      try {
        const auto rec = client.fetch_generation(work[i]);
        const std::string line = cseval::records::to_json_line(rec);
        {
          std::lock_guard<std::mutex> lock(appender_mutex);
          out << line << '\n';
          out.flush();
        }
        fetched.fetch_add(1);
      } catch (const cseval::NetworkError& e) {
        std::lock_guard<std::mutex> lock(appender_mutex);
        network_error = e.what();
        aborted.store(true);
        return;
      } catch (const cseval::Error& e) {
        {
          std::lock_guard<std::mutex> lock(appender_mutex);
          std::cerr << "rejected '" << work[i].prompt_id << "' (T="
                    << work[i].temperature << "): " << e.what() << "\n";
        }
        rejected.fetch_add(1);
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(args.jobs, 32));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(jobs));
  for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  std::cout << "fetched " << fetched.load() << ", skipped " << skipped
            << ", rejected " << rejected.load() << "\n";
  if (aborted.load()) {
    std::cerr << "network failure: " << network_error << "\n";
    return kExitNetwork;
  }
  return rejected.load() > 0 ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cseval: confidence-score evaluation of LLM generations from "
      "per-token log-probability records"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI-style config file");

  ScoreArgs score_args;
  auto* score = app.add_subcommand(
      "score", "Score every record in a file (perplexity, fluency, CS)");
  score->add_option("--input", score_args.input, "Record file (JSONL)")
      ->required();
  score->add_option("--output", score_args.output,
                    "Scores CSV path, '-' for stdout");
  score->add_option("--top-n", score_args.top_n,
                    "Size of the top-n set for the dispersion term")
      ->check(CLI::Range(2, 1000));

  ExperimentArgs exp1_args;
  auto* exp1 = app.add_subcommand(
      "exp1", "Creativity preference analysis over paired temperatures");
  exp1->add_option("--input", exp1_args.input, "Record file (JSONL)")
      ->required();
  exp1->add_option("--low-temp", exp1_args.low_temp, "Stable temperature");
  exp1->add_option("--high-temp", exp1_args.high_temp, "Creative temperature");
  exp1->add_option("--top-n", exp1_args.top_n, "Top-n set size")
      ->check(CLI::Range(2, 1000));
  exp1->add_option("--resamples", exp1_args.resamples, "Bootstrap resamples");
  exp1->add_option("--seed", exp1_args.seed, "Bootstrap seed");
  exp1->add_option("--level", exp1_args.level, "Confidence level");
  exp1->add_option("--format", exp1_args.format, "Report format: markdown|csv");
  exp1->add_option("--report", exp1_args.report_path,
                   "Report path, '-' for stdout");
  exp1->add_option("--results", exp1_args.results_path,
                   "Machine-readable results JSON path");

  ExperimentArgs exp2_args;
  auto* exp2 = app.add_subcommand(
      "exp2", "Task-difficulty separation analysis at one temperature");
  exp2->add_option("--input", exp2_args.input, "Record file (JSONL)")
      ->required();
  exp2->add_option("--temp", exp2_args.temp, "Generation temperature");
  exp2->add_option("--top-n", exp2_args.top_n, "Top-n set size")
      ->check(CLI::Range(2, 1000));
  exp2->add_option("--resamples", exp2_args.resamples, "Bootstrap resamples");
  exp2->add_option("--seed", exp2_args.seed, "Bootstrap seed");
  exp2->add_option("--level", exp2_args.level, "Confidence level");
  exp2->add_option("--format", exp2_args.format, "Report format: markdown|csv");
  exp2->add_option("--report", exp2_args.report_path,
                   "Report path, '-' for stdout");
  exp2->add_option("--results", exp2_args.results_path,
                   "Machine-readable results JSON path");

  FetchArgs fetch_args;
  auto* fetch = app.add_subcommand(
      "fetch", "Fetch generations with top-k logprobs from a completion API");
  fetch->add_option("--prompts", fetch_args.prompts_path, "Prompts file")
      ->required();
  fetch->add_option("--out", fetch_args.out_path, "Record file to append to");
  fetch->add_option("--model", fetch_args.model, "Model identifier");
  fetch->add_option("--temps", fetch_args.temps,
                    "Temperatures to fetch per prompt");
  fetch->add_option("--top-logprobs", fetch_args.top_logprobs,
                    "Alternatives to request per token")
      ->check(CLI::Range(1, 20));
  fetch->add_option("--max-tokens", fetch_args.max_tokens,
                    "Max tokens per generation (0 = provider default)");
  fetch->add_option("--base-url", fetch_args.base_url, "API base URL");
  fetch->add_option("--api-key-env", fetch_args.api_key_env,
                    "Environment variable holding the API key");
  fetch->add_option("--archive-dir", fetch_args.archive_dir,
                    "Directory for verbatim raw responses");
  fetch->add_option("--jobs", fetch_args.jobs, "Concurrent fetches");
  fetch->add_option("--max-attempts", fetch_args.max_attempts,
                    "Attempts per request before giving up");
  fetch->add_option("--backoff-ms", fetch_args.backoff_ms,
                    "Initial retry backoff in milliseconds");
  fetch->add_flag("--offline", fetch_args.offline,
                  "Disable all network use (fetch will fail immediately)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (score->parsed()) return run_score(score_args);
    if (exp1->parsed()) return run_exp(exp1_args, /*experiment1=*/true);
    if (exp2->parsed()) return run_exp(exp2_args, /*experiment1=*/false);
    if (fetch->parsed()) return run_fetch(fetch_args);
  } catch (const cseval::NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const cseval::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIngest;
  } catch (const cseval::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIngest;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIngest;
  }
  return kExitUsage;
}
