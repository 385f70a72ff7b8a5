#include "adaptchunk/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include <unicode/uchar.h>

#include "adaptchunk/error.hpp"
#include "adaptchunk/unicode.hpp"

namespace adaptchunk {

using nlohmann::json;

void MetricConfig::validate() const {
  bounds.validate();
  if (dcc_budget == 0) throw ConfigError("dcc_budget must be positive");
  if (window_step == 0) throw ConfigError("window_step must be at least 1");
}

RcResult references_completeness(const Chunking& chunking, const std::vector<EntityPronounPair>& pairs) {
  RcResult r;
  r.pairs = pairs.size();
  if (pairs.empty()) return r;
  const auto cuts = interior_boundaries(chunking);
  for (const auto& p : pairs) {
    auto it = std::upper_bound(cuts.begin(), cuts.end(), p.entity_start);
    if (it != cuts.end() && *it <= p.pronoun_end) ++r.broken;
  }
  r.value = 1.0 - static_cast<double>(r.broken) / static_cast<double>(r.pairs);
  return r;
}

BiResult block_integrity(const Chunking& chunking, const Document& doc, std::size_t tolerance) {
  BiResult r;
  r.blocks = doc.blocks.size();
  if (r.blocks == 0) return r;
  const auto cuts = interior_boundaries(chunking);
  for (const auto& b : doc.blocks) {
    // broken iff some cut lies in (start + τ, end − τ)
    const std::size_t lo = b.start + tolerance;
    if (b.end < tolerance || lo + 1 >= b.end - tolerance) continue;
    auto it = std::upper_bound(cuts.begin(), cuts.end(), lo);
    if (it != cuts.end() && *it < b.end - tolerance) ++r.broken;
  }
  r.value = 1.0 - static_cast<double>(r.broken) / static_cast<double>(r.blocks);
  return r;
}

namespace {

bool is_space_at(const Utf8Text& text, std::size_t ch) {
  std::size_t pos = text.byte_offset(ch);
  return u_isUWhiteSpace(static_cast<UChar32>(decode_utf8(text.str(), pos)));
}

Span trim(const Utf8Text& text, Span s) {
  while (s.start < s.end && is_space_at(text, s.start)) ++s.start;
  while (s.end > s.start && is_space_at(text, s.end - 1)) --s.end;
  return s;
}

// Distinct texts to embed, with a lookup from span to position in the batch.
class TextBatch {
 public:
  explicit TextBatch(const Document& doc) : doc_(doc) {}

  std::size_t add(Span s) {
    std::string text(doc_.slice(s.start, s.end));
    auto [it, inserted] = index_.try_emplace(text, texts_.size());
    if (inserted) texts_.push_back(std::move(text));
    return it->second;
  }

  std::vector<EmbeddingVector> embed(EmbeddingProvider& provider) const {
    if (texts_.empty()) return {};
    auto out = provider.embed_batch(texts_);
    if (out.size() != texts_.size()) throw InputError("provider returned the wrong number of vectors");
    return out;
  }

 private:
  const Document& doc_;
  std::vector<std::string> texts_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct IccPlan {
  std::vector<std::size_t> chunk_vec;                // per candidate chunk
  std::vector<std::vector<std::size_t>> block_vecs;  // per candidate chunk
};

IccPlan plan_icc(const Chunking& chunking, const Document& doc, TextBatch& batch) {
  IccPlan plan;
  for (std::size_t k = 0; k < chunking.chunks.size(); ++k) {
    const auto pieces = chunk_block_pieces(chunking, doc, k);
    if (pieces.size() < 2) continue;
    const auto& c = chunking.chunks[k];
    plan.chunk_vec.push_back(batch.add({c.start, c.end}));
    auto& blocks = plan.block_vecs.emplace_back();
    for (const Span& p : pieces) blocks.push_back(batch.add(p));
  }
  return plan;
}

IccResult finish_icc(const IccPlan& plan, const std::vector<EmbeddingVector>& vecs) {
  IccResult r;
  double total = 0;
  for (std::size_t i = 0; i < plan.chunk_vec.size(); ++i) {
    const auto& v = vecs[plan.chunk_vec[i]];
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t b : plan.block_vecs[i]) {
      if (v.is_zero() || vecs[b].is_zero()) {
        ++r.zero_excluded;
        continue;
      }
      sum += vecs[b].dot(v);
      ++n;
    }
    if (n < 2) continue;
    total += sum / static_cast<double>(n);
    ++r.scored_chunks;
  }
  if (r.scored_chunks > 0) r.value = std::max(0.0, total / static_cast<double>(r.scored_chunks));
  return r;
}

struct DccPlan {
  std::vector<Window> windows;
  std::vector<std::size_t> window_vec;
  std::vector<std::size_t> chunk_vec;  // every chunk
};

DccPlan plan_dcc(const Chunking& chunking, const MetricConfig& cfg, TextBatch& batch) {
  DccPlan plan;
  plan.windows = build_windows(chunking, cfg.dcc_budget, cfg.window_step);
  if (plan.windows.empty()) return plan;
  for (const auto& c : chunking.chunks) plan.chunk_vec.push_back(batch.add({c.start, c.end}));
  for (const auto& w : plan.windows) plan.window_vec.push_back(batch.add({w.start, w.end}));
  return plan;
}

DccResult finish_dcc(const DccPlan& plan, const std::vector<EmbeddingVector>& vecs) {
  DccResult r;
  double total = 0;
  for (std::size_t m = 0; m < plan.windows.size(); ++m) {
    const auto& w = vecs[plan.window_vec[m]];
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t k = plan.windows[m].first; k < plan.windows[m].last; ++k) {
      const auto& v = vecs[plan.chunk_vec[k]];
      if (w.is_zero() || v.is_zero()) {
        ++r.zero_excluded;
        continue;
      }
      sum += w.dot(v);
      ++n;
    }
    if (n == 0) continue;
    total += sum / static_cast<double>(n);
    ++r.windows;
  }
  if (r.windows > 0) r.value = std::max(0.0, total / static_cast<double>(r.windows));
  return r;
}

}  // namespace

std::vector<Span> chunk_block_pieces(const Chunking& chunking, const Document& doc, std::size_t k) {
  const Chunk& c = chunking.chunks.at(k);
  std::vector<Span> out;
  auto it = std::upper_bound(doc.blocks.begin(), doc.blocks.end(), c.start,
                             [](std::size_t v, const BlockSpan& b) { return v < b.end; });
  for (; it != doc.blocks.end() && it->start < c.end; ++it) {
    Span s = trim(doc.text, {std::max(it->start, c.start), std::min(it->end, c.end)});
    if (s.start < s.end) out.push_back(s);
  }
  return out;
}

IccResult intrachunk_cohesion(const Chunking& chunking, const Document& doc, EmbeddingProvider& provider) {
  TextBatch batch(doc);
  const auto plan = plan_icc(chunking, doc, batch);
  return finish_icc(plan, batch.embed(provider));
}

std::vector<Window> build_windows(const Chunking& chunking, std::size_t budget, std::size_t step) {
  if (step == 0) throw ConfigError("window_step must be at least 1");
  const auto& chunks = chunking.chunks;
  const std::size_t K = chunks.size();
  std::vector<Window> out;
  for (std::size_t i = 0; i + 1 < K; i += step) {
    Window w{i, i + 2, chunks[i].start, chunks[i + 1].end, chunks[i].token_count + chunks[i + 1].token_count};
    while (w.last < K && w.token_count + chunks[w.last].token_count <= budget) {
      w.token_count += chunks[w.last].token_count;
      w.end = chunks[w.last].end;
      ++w.last;
    }
    out.push_back(w);
  }
  return out;
}

DccResult document_contextual_coherence(const Chunking& chunking, const Document& doc, EmbeddingProvider& provider,
                                        const MetricConfig& cfg) {
  TextBatch batch(doc);
  const auto plan = plan_dcc(chunking, cfg, batch);
  return finish_dcc(plan, batch.embed(provider));
}

ScResult size_compliance(const Chunking& chunking, const SizeBounds& bounds) {
  if (chunking.chunks.empty()) throw InputError("empty chunking");
  ScResult r;
  r.chunks = chunking.chunks.size();
  for (const auto& c : chunking.chunks) {
    if (bounds.min <= c.token_count && c.token_count <= bounds.max) ++r.compliant;
  }
  r.value = static_cast<double>(r.compliant) / static_cast<double>(r.chunks);
  return r;
}

std::optional<double> metric_value(const MetricReport& report, std::string_view name) {
  if (name == "rc") return report.rc;
  if (name == "icc") return report.icc;
  if (name == "dcc") return report.dcc;
  if (name == "bi") return report.bi;
  if (name == "sc") return report.sc;
  throw InputError("unknown metric '" + std::string(name) + "'");
}

double mean_of_applicable(const MetricReport& report) {
  double sum = 0;
  std::size_t n = 0;
  for (const char* name : kMetricNames) {
    if (auto v = metric_value(report, name)) {
      sum += *v;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

MetricReport score(const Document& doc, const Chunking& input, const MetricConfig& cfg, EmbeddingProvider* provider,
                   const TokenCounter& counter) {
  if (input.doc_id != doc.id) throw InputError("chunking for '" + input.doc_id + "' scored against '" + doc.id + "'");
  Chunking chunking = input;
  if (chunking.counter != counter.name()) count_chunk_tokens(doc, chunking, counter);

  MetricReport r;
  r.doc_id = doc.id;
  r.method = chunking.method;
  auto& d = r.diagnostics;
  d.token_counter = counter.name();
  d.chunks = chunking.chunks.size();

  if (cfg.enable_rc) {
    const auto rc = references_completeness(chunking, doc.coref_pairs);
    r.rc = rc.value;
    d.pairs = rc.pairs;
  } else {
    d.disabled.push_back("rc");
  }

  const auto bi = block_integrity(chunking, doc, cfg.bi_tolerance);
  r.bi = bi.value;
  d.blocks = bi.blocks;

  const bool embed = cfg.enable_icc || cfg.enable_dcc;
  if (embed && !provider) throw ConfigError("ICC and DCC need an embedding provider");
  if (embed) {
    d.embedding_provider = provider->name();
    TextBatch batch(doc);
    IccPlan icc_plan;
    DccPlan dcc_plan;
    if (cfg.enable_icc) icc_plan = plan_icc(chunking, doc, batch);
    if (cfg.enable_dcc) dcc_plan = plan_dcc(chunking, cfg, batch);
    const auto vecs = batch.embed(*provider);
    if (cfg.enable_icc) {
      const auto icc = finish_icc(icc_plan, vecs);
      r.icc = icc.value;
      d.icc_chunks = icc.scored_chunks;
      d.zero_excluded += icc.zero_excluded;
    }
    if (cfg.enable_dcc) {
      const auto dcc = finish_dcc(dcc_plan, vecs);
      r.dcc = dcc.value;
      d.windows = dcc.windows;
      d.zero_excluded += dcc.zero_excluded;
    }
  }
  if (!cfg.enable_icc) d.disabled.push_back("icc");
  if (!cfg.enable_dcc) d.disabled.push_back("dcc");

  r.sc = size_compliance(chunking, cfg.bounds).value;

  for (const char* name : kMetricNames) {
    const bool disabled = std::find(d.disabled.begin(), d.disabled.end(), name) != d.disabled.end();
    if (!disabled && !metric_value(r, name)) d.not_applicable.push_back(name);
  }
  r.mean = mean_of_applicable(r);
  return r;
}

namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::ordered_json to_json(const MetricReport& r) {
  const auto& d = r.diagnostics;
  return nlohmann::ordered_json{{"doc_id", r.doc_id},
              {"method", r.method},
              {"rc", opt(r.rc)},
              {"icc", opt(r.icc)},
              {"dcc", opt(r.dcc)},
              {"bi", opt(r.bi)},
              {"sc", opt(r.sc)},
              {"mean", r.mean},
              {"diagnostics",
               {{"token_counter", d.token_counter},
                {"embedding_provider", d.embedding_provider},
                {"K", d.chunks},
                {"N", d.pairs},
                {"blocks", d.blocks},
                {"icc_chunks", d.icc_chunks},
                {"windows", d.windows},
                {"zero_excluded", d.zero_excluded},
                {"not_applicable", d.not_applicable},
                {"disabled", d.disabled}}}};
}

MetricReport metric_report_from_json(const json& j) {
  try {
    MetricReport r;
    r.doc_id = j.at("doc_id").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.rc = get_opt(j, "rc");
    r.icc = get_opt(j, "icc");
    r.dcc = get_opt(j, "dcc");
    r.bi = get_opt(j, "bi");
    r.sc = get_opt(j, "sc");
    r.mean = j.at("mean").get<double>();
    if (j.contains("diagnostics")) {
      const auto& dj = j.at("diagnostics");
      auto& d = r.diagnostics;
      d.token_counter = dj.value("token_counter", std::string{});
      d.embedding_provider = dj.value("embedding_provider", std::string{});
      d.chunks = dj.value("K", std::size_t{0});
      d.pairs = dj.value("N", std::size_t{0});
      d.blocks = dj.value("blocks", std::size_t{0});
      d.icc_chunks = dj.value("icc_chunks", std::size_t{0});
      d.windows = dj.value("windows", std::size_t{0});
      d.zero_excluded = dj.value("zero_excluded", std::size_t{0});
      d.not_applicable = dj.value("not_applicable", std::vector<std::string>{});
      d.disabled = dj.value("disabled", std::vector<std::string>{});
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed metric report: ") + e.what());
  }
}

}  // namespace adaptchunk
