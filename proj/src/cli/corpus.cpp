#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "adaptchunk/cli.hpp"
#include "adaptchunk/error.hpp"

namespace adaptchunk::cli {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t width = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (width == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < width; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !stop; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            stop = true;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<CorpusEntry> load_corpus(const RunConfig& cfg, std::size_t workers) {
  std::vector<CorpusEntry> entries;
  for (const auto& f : fs::directory_iterator(cfg.corpus_dir)) {
    if (!f.is_regular_file() || f.path().extension() != ".md") continue;
    CorpusEntry e;
    e.doc_id = f.path().stem().string();
    e.markdown = f.path();
    e.sidecar = cfg.sidecar_dir / (e.doc_id + ".json");
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  parallel_for(entries.size(), workers, [&](std::size_t i) {
    CorpusEntry& e = entries[i];
    try {
      if (!fs::exists(e.sidecar)) throw InputError("missing sidecar " + e.sidecar.string());
      e.document = load_document(e.markdown, e.sidecar);
    } catch (const Error& err) {
      e.error = err.what();
    }
  });
  return entries;
}

namespace {

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? v : "";
}

}  // namespace

Services make_services(const RunConfig& cfg) {
  Services s;
  try {
    s.counter = make_counter(cfg.token_counter, CounterOptions{cfg.bpe_vocab});
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  std::shared_ptr<LlmClient> inner;
  if (!cfg.replay_dir.empty()) {
    inner = std::make_shared<ReplayLlmClient>(cfg.replay_dir);
  } else if (!cfg.llm.url.empty()) {
    inner = std::make_shared<HttpLlmClient>(
        LlmEndpoint{cfg.llm.url, cfg.llm.model, cfg.llm.api_key_env, std::chrono::seconds(cfg.llm.timeout_s)});
  }
  if (inner) {
    s.llm = std::make_shared<ThrottledLlmClient>(inner, static_cast<std::ptrdiff_t>(cfg.llm.max_in_flight));
  }
  if (cfg.embedding.provider == "remote") {
    auto transport = std::make_shared<HttpTransport>(cfg.embedding.url, RetryPolicy{}, std::chrono::seconds(300),
                                                     env_or_empty(cfg.embedding.api_key_env));
    RemoteEmbedderOptions o;
    o.dimension = cfg.embedding.dimension;
    o.batch_size = cfg.embedding.batch_size;
    s.embedder = std::make_shared<RemoteEmbedder>(transport, o);
    s.embedding_transport = transport;
  } else {
    s.embedder = std::make_shared<HashEmbedder>(cfg.embedding.dimension);
  }
  if (!cfg.coref.url.empty()) {
    s.coref = std::make_shared<HttpTransport>(cfg.coref.url, RetryPolicy{}, std::chrono::seconds(300),
                                              env_or_empty(cfg.coref.api_key_env));
  }
  return s;
}

void Services::check_health() const {
  if (embedding_transport) adaptchunk::check_health(*embedding_transport);
  if (coref && coref != embedding_transport) adaptchunk::check_health(*coref);
}

ChunkingContext Services::chunking_context(const RunConfig& cfg) const {
  ChunkingContext ctx;
  ctx.counter = counter;
  ctx.bounds = cfg.bounds;
  ctx.llm = llm.get();
  ctx.llm_model = cfg.llm.model;
  return ctx;
}

}  // namespace adaptchunk::cli
