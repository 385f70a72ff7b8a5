#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptchunk/chunkers.hpp"
#include "adaptchunk/llm.hpp"
#include "adaptchunk/metrics.hpp"
#include "adaptchunk/postprocess.hpp"

namespace adaptchunk {

enum class ChunkerKind { kLlmRegex, kRecursive, kPage, kSentence };

std::string_view to_string(ChunkerKind kind);
ChunkerKind parse_chunker_kind(std::string_view name);  // InputError on unknown names

struct PortfolioEntry {
  std::string name;  // unique; the key in reports and selection tables
  ChunkerKind kind = ChunkerKind::kRecursive;
  ChunkerConfig config;
  bool postprocess = true;
};

using Portfolio = std::vector<PortfolioEntry>;

// llm-regex, recursive S=1100, recursive S=600 and page, all post-processed.
Portfolio default_portfolio();

// Non-empty, unique names, valid chunker configs. Throws ConfigError.
void validate_portfolio(const Portfolio& portfolio);

struct ChunkingContext {
  std::shared_ptr<const TokenCounter> counter;
  SizeBounds bounds;
  LlmClient* llm = nullptr;  // required by llm-regex entries
  std::string llm_model = "gpt-5";
};

// Runs one entry and post-processes it when configured. Post-processed
// chunkings get "+pp" appended to their method label.
Chunking run_chunker(const Document& doc, const PortfolioEntry& entry, const ChunkingContext& ctx);

struct MethodOutcome {
  std::string name;  // portfolio entry name
  std::optional<Chunking> chunking;
  std::optional<MetricReport> report;
  std::string error;  // set when the method failed on this document
};

struct SelectionResult {
  std::string doc_id;
  std::vector<MethodOutcome> outcomes;  // portfolio order
  std::string selected;
  Chunking chunking;

  const MetricReport& selected_report() const;
};

// Index of the first maximum; throws InputError on an empty list.
std::size_t argmax_first(const std::vector<double>& values);

// Chunks and scores the document with every entry and keeps the highest
// mean, preferring the earlier entry on ties. Failed methods are recorded
// and skipped; throws Error when every method fails.
SelectionResult select_best(const Document& doc, const Portfolio& portfolio, const ChunkingContext& ctx,
                            const MetricConfig& metrics, EmbeddingProvider* provider);

struct SelectionRow {
  std::string method;
  std::size_t documents = 0;
  long percent = 0;  // rounded to the nearest integer
};

// Share of documents per selected method, most selected first; ties keep
// first-seen order.
std::vector<SelectionRow> selection_stats(const std::vector<std::string>& selected);
std::vector<SelectionRow> selection_stats(const std::vector<SelectionResult>& results);

nlohmann::ordered_json to_json(const SelectionResult& result);

}  // namespace adaptchunk
