#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "adaptchunk/cli.hpp"
#include "adaptchunk/error.hpp"
#include "io.hpp"

namespace adaptchunk::cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void warn(std::string_view what) {
  static std::mutex m;
  std::lock_guard lock(m);
  fmt::print(stderr, "warning: {}\n", what);
}

std::string run_label(const PortfolioEntry& entry) { return entry.name + (entry.postprocess ? "+pp" : ""); }

namespace {

Portfolio pick_entries(const RunConfig& cfg, const ChunkOptions& options) {
  Portfolio out;
  if (options.methods.empty()) {
    out = cfg.portfolio;
  } else {
    for (const auto& name : options.methods) {
      auto it = std::find_if(cfg.portfolio.begin(), cfg.portfolio.end(), [&](const auto& e) { return e.name == name; });
      if (it == cfg.portfolio.end()) throw ConfigError("method \"" + name + "\" is not in the portfolio");
      out.push_back(*it);
    }
  }
  for (auto& e : out) {
    if (options.no_postprocess) e.postprocess = false;
  }
  return out;
}

void require_llm(const Portfolio& entries, const Services& services) {
  for (const auto& e : entries) {
    if (e.kind == ChunkerKind::kLlmRegex && !services.llm) {
      throw ConfigError("method \"" + e.name + "\" needs llm.url or replay_dir");
    }
  }
}

// Fills coref pairs from the coref service when the sidecar has none.
void resolve_coref(Document& doc, const Services& services) {
  if (!doc.coref_missing || !services.coref) return;
  if (auto pairs = extract_coref_pairs_remote(*services.coref, doc.text, doc.language)) {
    doc.coref_pairs = std::move(*pairs);
    doc.coref_missing = false;
  }
}

std::size_t count_load_failures(const std::vector<CorpusEntry>& corpus) {
  std::size_t n = 0;
  for (const auto& e : corpus) {
    if (!e.document) {
      warn(e.doc_id + ": " + e.error);
      ++n;
    }
  }
  return n;
}

std::vector<fs::path> files_with_suffix(const fs::path& dir, std::string_view suffix) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& f : fs::directory_iterator(dir)) {
    const std::string name = f.path().filename().string();
    if (f.is_regular_file() && name.ends_with(suffix)) out.push_back(f.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_size_table(const fs::path& chunks_dir) {
  std::vector<SizeStats> rows;
  if (fs::is_directory(chunks_dir)) {
    std::vector<fs::path> dirs;
    for (const auto& d : fs::directory_iterator(chunks_dir)) {
      if (d.is_directory() && fs::exists(d.path() / "stats.json")) dirs.push_back(d.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) rows.push_back(size_stats_from_json(json::parse(read_file(d / "stats.json"))));
  }
  write_file(chunks_dir / "sizes.txt", format_size_table(rows));
}

void write_metric_table(const fs::path& scores_dir) {
  std::vector<MetricAggregate> rows;
  for (const auto& f : files_with_suffix(scores_dir, ".aggregate.json")) {
    rows.push_back(metric_aggregate_from_json(json::parse(read_file(f))));
  }
  write_file(scores_dir / "metrics.txt", format_metric_table(rows));
}

}  // namespace

int cmd_chunk(const RunConfig& cfg, const ChunkOptions& options) {
  cfg.validate();
  const Portfolio entries = pick_entries(cfg, options);
  const Services services = make_services(cfg);
  require_llm(entries, services);
  services.check_health();
  const ChunkingContext ctx = services.chunking_context(cfg);

  const auto corpus = load_corpus(cfg, cfg.workers);
  std::size_t failures = count_load_failures(corpus);
  const fs::path chunks_dir = cfg.output_dir / "chunks";

  for (const auto& entry : entries) {
    const std::string label = run_label(entry);
    std::vector<std::optional<Chunking>> results(corpus.size());
    std::vector<std::string> errors(corpus.size());

    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
      if (!corpus[i].document) return;
      try {
        results[i] = run_chunker(*corpus[i].document, entry, ctx);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = chunks_dir / label;
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string manifest;
    std::vector<Chunking> done;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      ordered_json row = {{"doc_id", corpus[i].doc_id}};
      if (results[i]) {
        write_file(dir / (corpus[i].doc_id + ".jsonl"), chunking_to_jsonl(*corpus[i].document, *results[i]));
        row["method"] = results[i]->method;
        row["counter"] = results[i]->counter;
        row["chunks"] = results[i]->chunks.size();
        done.push_back(std::move(*results[i]));
      } else {
        const std::string why = corpus[i].document ? errors[i] : corpus[i].error;
        if (corpus[i].document) {
          warn(label + ": " + corpus[i].doc_id + ": " + why);
          ++failures;
        }
        row["error"] = why;
      }
      manifest += row.dump() + "\n";
    }
    write_file(dir / "documents.jsonl", manifest);
    write_file(dir / "stats.json", to_json(size_stats(label, done, seconds)).dump(2) + "\n");
  }
  write_size_table(chunks_dir);
  return failures ? kPartialFailure : kOk;
}

int cmd_score(const RunConfig& cfg, const std::vector<std::string>& labels_in) {
  cfg.validate();
  const Services services = make_services(cfg);
  services.check_health();
  const fs::path chunks_dir = cfg.output_dir / "chunks";
  std::vector<std::string> labels = labels_in;
  if (labels.empty() && fs::is_directory(chunks_dir)) {
    for (const auto& d : fs::directory_iterator(chunks_dir)) {
      if (d.is_directory()) labels.push_back(d.path().filename().string());
    }
    std::sort(labels.begin(), labels.end());
  }
  for (const auto& label : labels) {
    if (!fs::is_directory(chunks_dir / label)) throw InputError("no chunks for \"" + label + "\" in " + chunks_dir.string());
  }

  auto corpus = load_corpus(cfg, cfg.workers);
  std::size_t failures = count_load_failures(corpus);
  std::vector<std::string> coref_errors(corpus.size());
  parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
    if (!corpus[i].document) return;
    try {
      resolve_coref(*corpus[i].document, services);
    } catch (const Error& e) {
      coref_errors[i] = e.what();
    }
  });
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].doc_id] = i;

  const fs::path scores_dir = cfg.output_dir / "scores";
  for (const auto& label : labels) {
    const fs::path dir = chunks_dir / label;
    std::map<std::string, json> manifest;
    if (fs::exists(dir / "documents.jsonl")) {
      std::istringstream lines(read_file(dir / "documents.jsonl"));
      for (std::string line; std::getline(lines, line);) {
        if (line.empty()) continue;
        json row = json::parse(line);
        manifest[row.at("doc_id").get<std::string>()] = row;
      }
    }

    std::vector<std::optional<Chunking>> chunkings(corpus.size());
    std::vector<std::string> unknown;
    for (const auto& f : files_with_suffix(dir, ".jsonl")) {
      if (f.filename() == "documents.jsonl") continue;
      for (auto& c : chunkings_from_jsonl(read_file(f), label)) {
        auto it = index.find(c.doc_id);
        if (it == index.end()) {
          unknown.push_back(c.doc_id);
          continue;
        }
        if (auto m = manifest.find(c.doc_id); m != manifest.end()) {
          c.method = m->second.value("method", label);
          c.counter = m->second.value("counter", "");
        }
        chunkings[it->second] = std::move(c);
      }
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (chunkings[i] || !corpus[i].document) continue;
      auto m = manifest.find(corpus[i].doc_id);
      if (m == manifest.end() || !m->second.contains("error")) missing.push_back(corpus[i].doc_id);
    }
    if (!unknown.empty() || !missing.empty()) {
      std::string msg = label + ": chunk documents do not match the corpus";
      if (!unknown.empty()) msg += "; not in corpus: " + fmt::format("{}", fmt::join(unknown, ", "));
      if (!missing.empty()) msg += "; without chunks: " + fmt::format("{}", fmt::join(missing, ", "));
      throw InputError(msg);
    }

    std::vector<std::optional<MetricReport>> reports(corpus.size());
    std::vector<std::string> errors(corpus.size());
    parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
      if (!chunkings[i]) return;
      if (!coref_errors[i].empty()) {
        errors[i] = coref_errors[i];
        return;
      }
      try {
        reports[i] = score(*corpus[i].document, *chunkings[i], cfg.metrics, services.embedder.get(), *services.counter);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });

    std::string out;
    std::vector<MetricReport> done;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (reports[i]) {
        out += to_json(*reports[i]).dump() + "\n";
        done.push_back(std::move(*reports[i]));
      } else if (chunkings[i]) {
        warn(label + ": " + corpus[i].doc_id + ": " + errors[i]);
        ++failures;
      } else if (corpus[i].document) {
        ++failures;  // chunking failed earlier
      }
    }
    write_file(scores_dir / (label + ".jsonl"), out);
    write_file(scores_dir / (label + ".aggregate.json"), to_json(aggregate_reports(label, done)).dump(2) + "\n");
  }
  write_metric_table(scores_dir);
  return failures ? kPartialFailure : kOk;
}

int cmd_select(const RunConfig& cfg, const ChunkOptions& options) {
  cfg.validate();
  const Portfolio entries = pick_entries(cfg, options);
  validate_portfolio(entries);
  const Services services = make_services(cfg);
  require_llm(entries, services);
  const ChunkingContext ctx = services.chunking_context(cfg);

  auto corpus = load_corpus(cfg, cfg.workers);
  std::size_t failures = count_load_failures(corpus);
  std::vector<std::optional<SelectionResult>> results(corpus.size());
  std::vector<std::string> errors(corpus.size());
  parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
    if (!corpus[i].document) return;
    try {
      resolve_coref(*corpus[i].document, services);
      results[i] = select_best(*corpus[i].document, entries, ctx, cfg.metrics, services.embedder.get());
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  const fs::path dir = cfg.output_dir / "selection";
  fs::remove_all(dir);
  std::string lines;
  std::string failed;
  std::vector<std::string> selected;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (results[i]) {
      lines += to_json(*results[i]).dump() + "\n";
      write_file(dir / "chunks" / (corpus[i].doc_id + ".jsonl"),
                 chunking_to_jsonl(*corpus[i].document, results[i]->chunking));
      selected.push_back(results[i]->selected);
    } else if (corpus[i].document) {
      warn(corpus[i].doc_id + ": " + errors[i]);
      failed += ordered_json{{"doc_id", corpus[i].doc_id}, {"error", errors[i]}}.dump() + "\n";
      ++failures;
    }
  }
  const auto rows = selection_stats(selected);
  ordered_json summary = ordered_json::array();
  for (const auto& r : rows) summary.push_back({{"method", r.method}, {"documents", r.documents}, {"percent", r.percent}});
  write_file(dir / "selection.jsonl", lines);
  if (!failed.empty()) write_file(dir / "failures.jsonl", failed);
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_file(dir / "summary.txt", format_selection_table(rows));
  return failures ? kPartialFailure : kOk;
}

}  // namespace adaptchunk::cli
