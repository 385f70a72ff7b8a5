#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "adaptchunk/document.hpp"
#include "adaptchunk/separator_cascade.hpp"
#include "adaptchunk/token_counter.hpp"

namespace adaptchunk {

struct ChunkerConfig {
  std::size_t target_size = 1100;  // S, tokens
  std::size_t overlap = 0;         // tokens of backtracked overlap, recorded as a hint
  std::size_t sentences_per_chunk = 5;
  std::size_t sample_budget = 8000;  // tokens of the document shown to the LLM
  std::vector<std::string> separator_cascade = SeparatorCascade::default_patterns();
  std::string token_counter = std::string(WhitespaceCounter::kName);

  // Throws ConfigError if an invariant does not hold.
  void validate() const;
};

// Cuts at each page break. Breaks at offset 0 are ignored.
Chunking chunk_by_pages(const Document& doc, const TokenCounter& counter);

// Groups `n` sentences per chunk. The text between sentences stays with the
// preceding chunk and the last chunk absorbs the remainder. Throws
// InputError when the document has no sentence spans.
Chunking chunk_by_sentences(const Document& doc, std::size_t n, const TokenCounter& counter);

// Split-then-merge over characters [start, end) of the document: cascade
// split to segments of at most `max_tokens`, then greedy merge of adjacent
// segments while the merged text stays within `max_tokens`. When overlap is
// non-zero, each chunk after the first records the longest word-aligned
// suffix of its predecessor that fits in `overlap` tokens.
std::vector<Chunk> split_then_merge(const Document& doc, const IcuText& icu_text, std::size_t start, std::size_t end,
                                    std::size_t max_tokens, std::size_t overlap, const SeparatorCascade& cascade,
                                    const TokenCounter& counter);

Chunking recursive_split_merge(const Document& doc, const ChunkerConfig& cfg, const TokenCounter& counter);

// Fills token_count for every chunk and records the counter name.
void count_chunk_tokens(const Document& doc, Chunking& chunking, const TokenCounter& counter);

}  // namespace adaptchunk
