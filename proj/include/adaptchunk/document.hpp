#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adaptchunk/unicode.hpp"

namespace adaptchunk {

// All offsets in this header are character (code point) offsets.

enum class BlockKind { kParagraph, kTable, kFigure, kTitle, kList, kHeaderFooter, kOther };

std::string_view to_string(BlockKind kind);
BlockKind parse_block_kind(std::string_view name);  // unknown names map to kOther

struct BlockSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  BlockKind kind = BlockKind::kParagraph;

  friend bool operator==(const BlockSpan&, const BlockSpan&) = default;
};

struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

// An entity mention and a later pronoun referring to it. Only the entity
// start and the pronoun end take part in metrics; the texts are diagnostic.
struct EntityPronounPair {
  std::size_t entity_start = 0;
  std::size_t pronoun_end = 0;
  std::string entity_text;
  std::string pronoun_text;

  friend bool operator==(const EntityPronounPair&, const EntityPronounPair&) = default;
};

struct Document {
  std::string id;
  Utf8Text text;
  std::vector<BlockSpan> blocks;
  std::vector<std::size_t> page_breaks;
  std::vector<SentenceSpan> sentences;
  std::vector<EntityPronounPair> coref_pairs;
  std::string language = "en";
  // Optional sidecar fields that were absent (and so are empty above).
  bool sentences_missing = false;
  bool coref_missing = false;

  std::size_t length() const { return text.length(); }
  std::string_view slice(std::size_t start, std::size_t end) const { return text.slice(start, end); }

  friend bool operator==(const Document&, const Document&) = default;
};

// Checks every Document invariant and throws InputError naming the first
// violating span.
void check_document(const Document& doc);

// Offsets of each literal `<!-- PageBreak -->` marker.
std::vector<std::size_t> detect_page_breaks(const Utf8Text& text);

// Builds a Document from Markdown text and a parsed sidecar JSON string.
Document make_document(std::string id, std::string markdown, std::string_view sidecar_json);

// Reads `markdown_path` and `sidecar_path`; the document id is the Markdown
// file stem.
Document load_document(const std::filesystem::path& markdown_path,
                       const std::filesystem::path& sidecar_path);

std::string sidecar_to_json(const Document& doc);

struct Chunk {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t token_count = 0;
  // Trailing span of the previous chunk that a consumer may prepend for
  // overlap. Never part of the canonical span.
  std::optional<std::size_t> overlap_start;

  std::size_t size() const { return end - start; }
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct Chunking {
  std::string doc_id;
  std::string method;
  std::string counter;  // name of the TokenCounter behind token_count
  std::vector<Chunk> chunks;

  friend bool operator==(const Chunking&, const Chunking&) = default;
};

// Cut offsets between adjacent chunks: every start but the first and every
// end but the last, deduplicated. Excludes 0 and L for valid chunkings.
std::vector<std::size_t> interior_boundaries(const Chunking& chunking);

struct Violation {
  enum class Kind { kEmptyChunk, kBadStart, kBadEnd, kGap, kOverlap, kOutOfRange, kNoChunks, kDocIdMismatch };
  Kind kind;
  std::size_t offset = 0;
  std::string message;
};

// Every violated Chunking invariant; empty iff the chunking is valid.
std::vector<Violation> validate_chunking(const Document& doc, const Chunking& chunking);

// Builds a contiguous chunking from sorted cut offsets in (0, L). Token
// counts are left at zero.
Chunking chunking_from_cuts(const Document& doc, const std::vector<std::size_t>& cuts, std::string method);

// JSONL with one {doc_id, index, start, end, token_count, text} object per
// chunk; `overlap_hint: [start, end]` is added when present.
std::string chunking_to_jsonl(const Document& doc, const Chunking& chunking);

// Parses chunk JSONL lines (possibly for several documents) grouped by
// doc_id in first-appearance order. `text` fields are ignored.
std::vector<Chunking> chunkings_from_jsonl(std::string_view jsonl, std::string_view method);

}  // namespace adaptchunk
