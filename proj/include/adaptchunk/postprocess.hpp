#pragma once

#include <cstddef>

#include "adaptchunk/chunkers.hpp"
#include "adaptchunk/document.hpp"
#include "adaptchunk/token_counter.hpp"

namespace adaptchunk {

struct SizeBounds {
  std::size_t min = 100;         // m
  std::size_t max = 1100;        // M
  std::size_t merge_cap = 1150;  // ceiling for tiny-chunk merges

  void validate() const;  // 0 < m < M <= merge_cap, else ConfigError
};

// Replaces every chunk above bounds.max by a split-then-merge of its own
// text with the separator cascade; other chunks are kept as is.
Chunking resplit_oversized(const Chunking& chunking, const Document& doc, const SizeBounds& bounds,
                           const ChunkerConfig& cfg, const TokenCounter& counter);

// Left-to-right sweeps, repeated until nothing changes. A chunk below
// bounds.min joins a neighbour, preferring a merge that stays within
// bounds.max and then one within bounds.merge_cap; the predecessor wins
// ties. A tiny chunk stays only when both merges would pass the cap.
Chunking merge_tiny(const Chunking& chunking, const Document& doc, const SizeBounds& bounds,
                    const TokenCounter& counter);

// resplit_oversized then merge_tiny, repeated until the pair of passes maps
// the chunking to itself (at most `max_rounds` rounds).
Chunking postprocess(const Chunking& chunking, const Document& doc, const SizeBounds& bounds,
                     const ChunkerConfig& cfg, const TokenCounter& counter, std::size_t max_rounds = 8);

}  // namespace adaptchunk
