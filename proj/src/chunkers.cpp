#include "adaptchunk/chunkers.hpp"

#include <algorithm>
#include <optional>

#include <unicode/uchar.h>

#include "adaptchunk/error.hpp"

namespace adaptchunk {

void ChunkerConfig::validate() const {
  if (target_size == 0) throw ConfigError("target_size must be positive");
  if (overlap >= target_size) throw ConfigError("overlap must be smaller than target_size");
  if (sentences_per_chunk == 0) throw ConfigError("sentences_per_chunk must be at least 1");
  if (sample_budget == 0) throw ConfigError("sample_budget must be positive");
  SeparatorCascade{separator_cascade};
}

void count_chunk_tokens(const Document& doc, Chunking& chunking, const TokenCounter& counter) {
  for (Chunk& c : chunking.chunks) c.token_count = counter.count(doc.slice(c.start, c.end));
  chunking.counter = counter.name();
}

Chunking chunk_by_pages(const Document& doc, const TokenCounter& counter) {
  Chunking out = chunking_from_cuts(doc, doc.page_breaks, "page");
  count_chunk_tokens(doc, out, counter);
  return out;
}

Chunking chunk_by_sentences(const Document& doc, std::size_t n, const TokenCounter& counter) {
  if (doc.sentences.empty()) throw InputError(doc.id + ": sentence spans required");
  if (n == 0) throw ConfigError("sentences_per_chunk must be at least 1");
  std::vector<std::size_t> cuts;
  for (std::size_t i = n; i < doc.sentences.size(); i += n) cuts.push_back(doc.sentences[i].start);
  Chunking out = chunking_from_cuts(doc, cuts, "sentence");
  count_chunk_tokens(doc, out, counter);
  return out;
}

namespace {

bool space_at(const Document& doc, std::size_t ch) {
  std::size_t pos = doc.text.byte_offset(ch);
  return u_isUWhiteSpace(static_cast<UChar32>(decode_utf8(doc.text.str(), pos)));
}

// Start of the longest word-aligned suffix of `prev` within `overlap` tokens.
std::optional<std::size_t> overlap_hint(const Document& doc, const Chunk& prev, std::size_t overlap,
                                        const TokenCounter& counter) {
  std::vector<std::size_t> starts;
  for (std::size_t p = prev.start; p < prev.end; ++p) {
    if (!space_at(doc, p) && (p == prev.start || space_at(doc, p - 1))) starts.push_back(p);
  }
  auto fits = [&](std::size_t i) { return counter.count(doc.slice(starts[i], prev.end)) <= overlap; };
  if (starts.empty() || !fits(starts.size() - 1)) return std::nullopt;
  std::size_t lo = 0, hi = starts.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (fits(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return starts[lo];
}

}  // namespace

std::vector<Chunk> split_then_merge(const Document& doc, const IcuText& icu_text, std::size_t start, std::size_t end,
                                    std::size_t max_tokens, std::size_t overlap, const SeparatorCascade& cascade,
                                    const TokenCounter& counter) {
  const std::vector<Span> segments = cascade.split(doc.text, icu_text, start, end, max_tokens, counter);
  std::vector<Chunk> out;
  if (segments.empty()) return out;

  auto tokens = [&](std::size_t a, std::size_t b) { return counter.count(doc.slice(a, b)); };
  const bool bounded = counter.subadditive();

  std::size_t first = 0;  // first segment of the open chunk
  std::size_t open_tokens = tokens(segments[0].start, segments[0].end);
  auto close = [&](std::size_t last) {
    Chunk c{segments[first].start, segments[last].end, 0, std::nullopt};
    c.token_count = bounded ? tokens(c.start, c.end) : open_tokens;
    if (overlap > 0 && !out.empty()) c.overlap_start = overlap_hint(doc, out.back(), overlap, counter);
    out.push_back(c);
  };
  for (std::size_t i = 1; i < segments.size(); ++i) {
    const std::size_t seg_tokens = tokens(segments[i].start, segments[i].end);
    // With a subadditive counter the running sum is an upper bound, so the
    // exact recount is only needed once the bound overflows.
    if (bounded && open_tokens + seg_tokens <= max_tokens) {
      open_tokens += seg_tokens;
      continue;
    }
    const std::size_t merged = tokens(segments[first].start, segments[i].end);
    if (merged <= max_tokens) {
      open_tokens = merged;
      continue;
    }
    close(i - 1);
    first = i;
    open_tokens = seg_tokens;
  }
  close(segments.size() - 1);
  return out;
}

Chunking recursive_split_merge(const Document& doc, const ChunkerConfig& cfg, const TokenCounter& counter) {
  const SeparatorCascade cascade(cfg.separator_cascade);
  const IcuText icu_text(doc.text.str());
  Chunking out{doc.id, "recursive-" + std::to_string(cfg.target_size), counter.name(), {}};
  out.chunks = split_then_merge(doc, icu_text, 0, doc.length(), cfg.target_size, cfg.overlap, cascade, counter);
  return out;
}

}  // namespace adaptchunk
