#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "adaptchunk/document.hpp"

namespace synth {

struct Options {
  std::size_t min_blocks = 2;
  std::size_t max_blocks = 40;
  std::size_t max_words = 220;    // per paragraph
  std::size_t max_pairs = 30;
  double page_break_rate = 0.15;  // chance of a page break before a block
  bool unicode = false;           // sprinkle non-ASCII words in
  bool sentences = true;
};

using Rng = std::mt19937_64;

std::string word(Rng& rng, bool unicode = false);

// Markdown-looking document whose blocks tile the text, with page break
// markers, sentence spans and random entity-pronoun pairs.
adaptchunk::Document document(Rng& rng, std::string id, const Options& options = {});

// Random contiguous chunking with between 1 and max_chunks chunks. Token
// counts are left at zero.
adaptchunk::Chunking random_chunking(Rng& rng, const adaptchunk::Document& doc, std::size_t max_chunks);

// A chunking whose chunks hold exactly `sizes[i]` whitespace tokens, plus a
// document made of those words. Useful for size-driven tests.
adaptchunk::Document document_with_token_sizes(Rng& rng, std::string id, const std::vector<std::size_t>& sizes,
                                               adaptchunk::Chunking& chunking);

}  // namespace synth
