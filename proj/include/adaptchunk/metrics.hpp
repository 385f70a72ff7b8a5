#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptchunk/document.hpp"
#include "adaptchunk/postprocess.hpp"
#include "adaptchunk/providers.hpp"
#include "adaptchunk/token_counter.hpp"

namespace adaptchunk {

struct MetricConfig {
  SizeBounds bounds;
  std::size_t bi_tolerance = 5;     // τ, characters
  std::size_t dcc_budget = 3000;    // T, tokens per window
  std::size_t window_step = 1;      // chunks
  std::string token_counter = std::string(WhitespaceCounter::kName);
  std::string embedding_provider = std::string(HashEmbedder::kName);
  // Corpus-wide switches; a disabled metric is left out of every mean.
  bool enable_rc = true;
  bool enable_icc = true;
  bool enable_dcc = true;

  void validate() const;
};

// A metric value is std::nullopt when the metric does not apply.
struct RcResult {
  std::optional<double> value;
  std::size_t pairs = 0;   // N
  std::size_t broken = 0;  // Σ m_i
};

struct BiResult {
  double value = 1.0;
  std::size_t blocks = 0;  // |G| − 1
  std::size_t broken = 0;
};

struct IccResult {
  std::optional<double> value;
  std::size_t scored_chunks = 0;  // |𝒦|
  std::size_t zero_excluded = 0;  // block/chunk pairs dropped for a zero vector
};

struct Window {
  std::size_t first = 0;  // chunk indices [first, last)
  std::size_t last = 0;
  std::size_t start = 0;  // character span of the window text
  std::size_t end = 0;
  std::size_t token_count = 0;

  std::size_t size() const { return last - first; }
  friend bool operator==(const Window&, const Window&) = default;
};

struct DccResult {
  std::optional<double> value;
  std::size_t windows = 0;
  std::size_t zero_excluded = 0;
};

struct ScResult {
  double value = 0.0;
  std::size_t chunks = 0;  // K
  std::size_t compliant = 0;
};

// Pairs broken by a cut b with entity_start < b <= pronoun_end.
RcResult references_completeness(const Chunking& chunking, const std::vector<EntityPronounPair>& pairs);

// Blocks containing a cut b with start + τ < b < end − τ count as broken.
BiResult block_integrity(const Chunking& chunking, const Document& doc, std::size_t tolerance);

// Block texts inside chunk k: each block's intersection with the chunk,
// trimmed of surrounding whitespace, empty pieces dropped.
std::vector<Span> chunk_block_pieces(const Chunking& chunking, const Document& doc, std::size_t k);

IccResult intrachunk_cohesion(const Chunking& chunking, const Document& doc, EmbeddingProvider& provider);

// Windows over chunk token counts: from each start index (advancing by
// `step`), add chunks while the running total stays within `budget`, taking
// at least two. Starts with fewer than two chunks left emit nothing.
std::vector<Window> build_windows(const Chunking& chunking, std::size_t budget, std::size_t step);

DccResult document_contextual_coherence(const Chunking& chunking, const Document& doc, EmbeddingProvider& provider,
                                        const MetricConfig& cfg);

// Uses the chunks' token counts. Throws InputError on an empty chunking.
ScResult size_compliance(const Chunking& chunking, const SizeBounds& bounds);

struct MetricReport {
  std::string doc_id;
  std::string method;
  std::optional<double> rc, icc, dcc, bi, sc;
  double mean = 0.0;

  struct Diagnostics {
    std::string token_counter;
    std::string embedding_provider;
    std::size_t chunks = 0;          // K
    std::size_t pairs = 0;           // N
    std::size_t blocks = 0;          // |G| − 1
    std::size_t icc_chunks = 0;      // |𝒦|
    std::size_t windows = 0;         // |M|
    std::size_t zero_excluded = 0;
    std::vector<std::string> not_applicable;
    std::vector<std::string> disabled;
    friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
  } diagnostics;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

inline constexpr const char* kMetricNames[] = {"rc", "icc", "dcc", "bi", "sc"};

std::optional<double> metric_value(const MetricReport& report, std::string_view name);

// Arithmetic mean over the applicable values.
double mean_of_applicable(const MetricReport& report);

// Computes all five metrics. Token counts are recomputed with `counter` when
// the chunking carries counts from another counter. `provider` may be null
// when ICC and DCC are disabled. Embedding requests for one document go out
// as a single batch of distinct texts.
MetricReport score(const Document& doc, const Chunking& chunking, const MetricConfig& cfg,
                   EmbeddingProvider* provider, const TokenCounter& counter);

nlohmann::ordered_json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const nlohmann::json& j);

}  // namespace adaptchunk
