#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptchunk/document.hpp"
#include "adaptchunk/llm.hpp"
#include "adaptchunk/metrics.hpp"
#include "adaptchunk/postprocess.hpp"
#include "adaptchunk/providers.hpp"
#include "adaptchunk/selector.hpp"
#include "adaptchunk/stats.hpp"

namespace adaptchunk::cli {

namespace fs = std::filesystem;

struct EmbeddingEndpoint {
  std::string provider = std::string(HashEmbedder::kName);  // "hash" or "remote"
  std::string url;                                           // required for "remote"
  std::size_t dimension = 256;
  std::size_t batch_size = 64;
  std::string api_key_env = "ADAPTCHUNK_EMBED_API_KEY";
};

struct CorefEndpoint {
  std::string url;  // when set, documents without sidecar coref pairs are resolved remotely
  std::string api_key_env = "ADAPTCHUNK_COREF_API_KEY";
};

struct LlmSettings {
  std::string url;
  std::string model = "gpt-5";
  std::string api_key_env = "ADAPTCHUNK_LLM_API_KEY";
  std::size_t max_in_flight = 4;
  std::size_t timeout_s = 120;
};

struct RunConfig {
  fs::path corpus_dir;
  fs::path sidecar_dir;  // defaults to corpus_dir
  fs::path output_dir = "out";
  std::string token_counter = std::string(BpeCounter::kName);
  fs::path bpe_vocab;  // empty: bundled vocabulary
  SizeBounds bounds;
  MetricConfig metrics;
  Portfolio portfolio = default_portfolio();
  EmbeddingEndpoint embedding;
  CorefEndpoint coref;
  LlmSettings llm;
  fs::path replay_dir;  // replaces the LLM endpoint when set
  std::size_t workers = 1;

  // Throws ConfigError on bad values or missing paths.
  void validate() const;
};

// Parses a config document. Relative paths resolve against `base_dir`.
// Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, const fs::path& base_dir);
RunConfig load_run_config(const fs::path& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);

// One Markdown file of the corpus and its load result.
struct CorpusEntry {
  std::string doc_id;
  fs::path markdown;
  fs::path sidecar;
  std::optional<Document> document;
  std::string error;
};

// `*.md` files of corpus_dir in name order, each paired with
// `<sidecar_dir>/<stem>.json`. Load failures are recorded per entry.
std::vector<CorpusEntry> load_corpus(const RunConfig& cfg, std::size_t workers);

// Calls fn(i) for i in [0, n) on up to `workers` threads. The first
// exception is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

// Services built from a RunConfig, shared by the commands.
struct Services {
  std::shared_ptr<const TokenCounter> counter;
  std::shared_ptr<LlmClient> llm;  // null when neither endpoint nor replay dir is set
  std::shared_ptr<EmbeddingProvider> embedder;
  std::shared_ptr<JsonTransport> coref;  // null unless configured
  std::shared_ptr<JsonTransport> embedding_transport;  // set for the remote embedder

  // Queries /health on every configured sidecar; throws TransportError.
  void check_health() const;

  ChunkingContext chunking_context(const RunConfig& cfg) const;
};

Services make_services(const RunConfig& cfg);

enum ExitCode : int { kOk = 0, kPartialFailure = 1, kConfigError = 2 };

struct ChunkOptions {
  std::vector<std::string> methods;  // portfolio entry names; empty means all
  bool no_postprocess = false;
};

// Label of a run: the entry name, with "+pp" when post-processed.
std::string run_label(const PortfolioEntry& entry);

// Writes chunks/<label>/<doc_id>.jsonl, chunks/<label>/documents.jsonl,
// chunks/<label>/stats.json and chunks/sizes.txt. Wall time covers
// chunking only.
int cmd_chunk(const RunConfig& cfg, const ChunkOptions& options);

// Scores chunks/<label>/ for each given label (all present when empty).
// Writes scores/<label>.jsonl, scores/<label>.aggregate.json and
// scores/metrics.txt.
int cmd_score(const RunConfig& cfg, const std::vector<std::string>& labels);

// Writes selection/selection.jsonl, selection/chunks/<doc_id>.jsonl,
// selection/summary.json and selection/summary.txt.
int cmd_select(const RunConfig& cfg, const ChunkOptions& options);

// Renders the tables and SVG histograms of a results directory into
// <results>/report/ (tables.txt plus <label>.<metric>.svg).
int cmd_report(const fs::path& results_dir);

// Histogram of values in [0, 1] as a standalone SVG document.
std::string histogram_svg(const std::string& title, const std::vector<double>& values, std::size_t bins = 10);

}  // namespace adaptchunk::cli
