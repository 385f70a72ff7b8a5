#include "adaptchunk/postprocess.hpp"

#include "adaptchunk/error.hpp"

namespace adaptchunk {

void SizeBounds::validate() const {
  if (!(0 < min && min < max && max <= merge_cap)) {
    throw ConfigError("size bounds must satisfy 0 < min < max <= merge_cap");
  }
}

namespace {

// Token counts must come from `counter`; recount when the chunking was
// produced with a different one.
Chunking with_counts(const Chunking& chunking, const Document& doc, const TokenCounter& counter) {
  Chunking out = chunking;
  if (out.counter != counter.name()) count_chunk_tokens(doc, out, counter);
  return out;
}

}  // namespace

Chunking resplit_oversized(const Chunking& chunking, const Document& doc, const SizeBounds& bounds,
                           const ChunkerConfig& cfg, const TokenCounter& counter) {
  Chunking in = with_counts(chunking, doc, counter);
  Chunking out{in.doc_id, in.method, in.counter, {}};
  std::optional<IcuText> icu_text;
  std::optional<SeparatorCascade> cascade;
  for (const Chunk& c : in.chunks) {
    if (c.token_count <= bounds.max) {
      out.chunks.push_back(c);
      continue;
    }
    if (!icu_text) {
      icu_text.emplace(doc.text.str());
      cascade.emplace(cfg.separator_cascade);
    }
    for (Chunk& piece : split_then_merge(doc, *icu_text, c.start, c.end, bounds.max, 0, *cascade, counter)) {
      out.chunks.push_back(piece);
    }
  }
  return out;
}

Chunking merge_tiny(const Chunking& chunking, const Document& doc, const SizeBounds& bounds,
                    const TokenCounter& counter) {
  Chunking out = with_counts(chunking, doc, counter);
  auto& chunks = out.chunks;
  auto merged_tokens = [&](std::size_t a, std::size_t b) {
    return counter.count(doc.slice(chunks[a].start, chunks[b].end));
  };

  // Every merge removes a chunk, so K sweeps always reach the fixpoint.
  const std::size_t max_sweeps = chunks.size() + 1;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    std::size_t i = 0;
    while (i < chunks.size()) {
      if (chunks[i].token_count >= bounds.min || chunks.size() < 2) {
        ++i;
        continue;
      }
      const std::size_t with_prev = i > 0 ? merged_tokens(i - 1, i) : SIZE_MAX;
      const std::size_t with_next = i + 1 < chunks.size() ? merged_tokens(i, i + 1) : SIZE_MAX;

      int direction = 0;  // -1 predecessor, +1 successor
      if (with_prev <= bounds.max) {
        direction = -1;
      } else if (with_next <= bounds.max) {
        direction = 1;
      } else if (with_prev <= bounds.merge_cap) {
        direction = -1;
      } else if (with_next <= bounds.merge_cap) {
        direction = 1;
      }
      if (direction == 0) {
        ++i;
        continue;
      }
      const std::size_t keep = direction < 0 ? i - 1 : i;
      chunks[keep].end = chunks[keep + 1].end;
      chunks[keep].token_count = direction < 0 ? with_prev : with_next;
      chunks.erase(chunks.begin() + static_cast<std::ptrdiff_t>(keep) + 1);
      changed = true;
      // Re-examine the merged chunk: it may still be tiny.
      i = keep;
    }
    if (!changed) break;
  }
  return out;
}

Chunking postprocess(const Chunking& chunking, const Document& doc, const SizeBounds& bounds,
                     const ChunkerConfig& cfg, const TokenCounter& counter, std::size_t max_rounds) {
  Chunking current = with_counts(chunking, doc, counter);
  for (std::size_t round = 0; round < std::max<std::size_t>(1, max_rounds); ++round) {
    Chunking next = merge_tiny(resplit_oversized(current, doc, bounds, cfg, counter), doc, bounds, counter);
    const bool stable = next.chunks.size() == current.chunks.size() &&
                        std::equal(next.chunks.begin(), next.chunks.end(), current.chunks.begin(),
                                   [](const Chunk& a, const Chunk& b) { return a.start == b.start && a.end == b.end; });
    current = std::move(next);
    if (stable) break;
  }
  return current;
}

}  // namespace adaptchunk
