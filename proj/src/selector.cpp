#include "adaptchunk/selector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "adaptchunk/error.hpp"

namespace adaptchunk {

std::string_view to_string(ChunkerKind kind) {
  switch (kind) {
    case ChunkerKind::kLlmRegex: return "llm-regex";
    case ChunkerKind::kRecursive: return "recursive";
    case ChunkerKind::kPage: return "page";
    case ChunkerKind::kSentence: return "sentence";
  }
  return "recursive";
}

ChunkerKind parse_chunker_kind(std::string_view name) {
  if (name == "llm-regex") return ChunkerKind::kLlmRegex;
  if (name == "recursive") return ChunkerKind::kRecursive;
  if (name == "page") return ChunkerKind::kPage;
  if (name == "sentence") return ChunkerKind::kSentence;
  throw InputError("unknown chunker '" + std::string(name) + "'");
}

Portfolio default_portfolio() {
  Portfolio p;
  p.push_back({"llm-regex", ChunkerKind::kLlmRegex, {}, true});
  PortfolioEntry r1100{"recursive-1100", ChunkerKind::kRecursive, {}, true};
  r1100.config.target_size = 1100;
  p.push_back(r1100);
  PortfolioEntry r600{"recursive-600", ChunkerKind::kRecursive, {}, true};
  r600.config.target_size = 600;
  p.push_back(r600);
  p.push_back({"page", ChunkerKind::kPage, {}, true});
  return p;
}

void validate_portfolio(const Portfolio& portfolio) {
  if (portfolio.empty()) throw ConfigError("portfolio is empty");
  std::set<std::string> names;
  for (const auto& e : portfolio) {
    if (e.name.empty()) throw ConfigError("portfolio entry without a name");
    if (!names.insert(e.name).second) throw ConfigError("duplicate portfolio entry '" + e.name + "'");
    e.config.validate();
  }
}

Chunking run_chunker(const Document& doc, const PortfolioEntry& entry, const ChunkingContext& ctx) {
  const TokenCounter& counter = *ctx.counter;
  Chunking out;
  switch (entry.kind) {
    case ChunkerKind::kLlmRegex:
      if (!ctx.llm) throw ConfigError("'" + entry.name + "' needs an LLM endpoint or a replay directory");
      out = llm_regex_chunk(doc, *ctx.llm, entry.config, counter, ctx.llm_model);
      break;
    case ChunkerKind::kRecursive:
      out = recursive_split_merge(doc, entry.config, counter);
      break;
    case ChunkerKind::kPage:
      out = chunk_by_pages(doc, counter);
      break;
    case ChunkerKind::kSentence:
      out = chunk_by_sentences(doc, entry.config.sentences_per_chunk, counter);
      break;
  }
  if (entry.postprocess) {
    out = postprocess(out, doc, ctx.bounds, entry.config, counter);
    out.method += "+pp";
  }
  return out;
}

const MetricReport& SelectionResult::selected_report() const {
  for (const auto& o : outcomes) {
    if (o.name == selected && o.report) return *o.report;
  }
  throw Error("selection for '" + doc_id + "' has no report for '" + selected + "'");
}

std::size_t argmax_first(const std::vector<double>& values) {
  if (values.empty()) throw InputError("argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

SelectionResult select_best(const Document& doc, const Portfolio& portfolio, const ChunkingContext& ctx,
                            const MetricConfig& metrics, EmbeddingProvider* provider) {
  validate_portfolio(portfolio);
  SelectionResult r;
  r.doc_id = doc.id;
  std::vector<double> means;
  std::vector<std::size_t> scored;
  for (const auto& entry : portfolio) {
    MethodOutcome o;
    o.name = entry.name;
    try {
      o.chunking = run_chunker(doc, entry, ctx);
      o.report = score(doc, *o.chunking, metrics, provider, *ctx.counter);
      means.push_back(o.report->mean);
      scored.push_back(r.outcomes.size());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      o.chunking.reset();
      o.report.reset();
      o.error = e.what();
    }
    r.outcomes.push_back(std::move(o));
  }
  if (scored.empty()) {
    std::string why;
    for (const auto& o : r.outcomes) why += "\n  " + o.name + ": " + o.error;
    throw Error(doc.id + ": every chunking method failed" + why);
  }
  const auto& winner = r.outcomes[scored[argmax_first(means)]];
  r.selected = winner.name;
  r.chunking = *winner.chunking;
  return r;
}

std::vector<SelectionRow> selection_stats(const std::vector<std::string>& selected) {
  std::vector<SelectionRow> rows;
  for (const auto& s : selected) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SelectionRow& r) { return r.method == s; });
    if (it == rows.end()) it = rows.insert(rows.end(), SelectionRow{s, 0, 0});
    ++it->documents;
  }
  for (auto& row : rows) {
    row.percent = std::lround(100.0 * static_cast<double>(row.documents) / static_cast<double>(selected.size()));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SelectionRow& a, const SelectionRow& b) { return a.documents > b.documents; });
  return rows;
}

std::vector<SelectionRow> selection_stats(const std::vector<SelectionResult>& results) {
  std::vector<std::string> selected;
  selected.reserve(results.size());
  for (const auto& r : results) selected.push_back(r.selected);
  return selection_stats(selected);
}

nlohmann::ordered_json to_json(const SelectionResult& result) {
  nlohmann::ordered_json reports = nlohmann::ordered_json::object();
  nlohmann::ordered_json failures = nlohmann::ordered_json::object();
  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const auto& o : result.outcomes) {
    if (o.report) {
      reports[o.name] = to_json(*o.report);
      methods[o.name] = o.chunking->method;
    } else {
      failures[o.name] = o.error;
    }
  }
  const auto& c = result.chunking;
  nlohmann::ordered_json spans = nlohmann::ordered_json::array();
  for (const auto& ch : c.chunks) spans.push_back({ch.start, ch.end, ch.token_count});
  return {{"doc_id", result.doc_id},
          {"selected", result.selected},
          {"selected_method", c.method},
          {"mean", result.selected_report().mean},
          {"reports", reports},
          {"chunk_methods", methods},
          {"failures", failures},
          {"chunks", spans}};
}

}  // namespace adaptchunk
