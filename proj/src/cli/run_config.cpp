#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "adaptchunk/cli.hpp"
#include "adaptchunk/error.hpp"

namespace adaptchunk::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  const std::set<std::string_view> known(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + std::string(where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

void read_path(const json& j, const char* key, const fs::path& base, fs::path& out) {
  std::string s;
  read(j, key, s);
  if (s.empty()) return;
  const fs::path p(s);
  out = p.is_absolute() ? p : base / p;
}

PortfolioEntry entry_from_json(const json& j) {
  check_keys(j, "portfolio entry",
             {"name", "kind", "target_size", "overlap", "sentences_per_chunk", "sample_budget", "separator_cascade",
              "postprocess"});
  PortfolioEntry e;
  read(j, "name", e.name);
  std::string kind;
  read(j, "kind", kind);
  try {
    e.kind = parse_chunker_kind(kind);
  } catch (const InputError& err) {
    throw ConfigError(err.what());
  }
  read(j, "target_size", e.config.target_size);
  read(j, "overlap", e.config.overlap);
  read(j, "sentences_per_chunk", e.config.sentences_per_chunk);
  read(j, "sample_budget", e.config.sample_budget);
  read(j, "separator_cascade", e.config.separator_cascade);
  read(j, "postprocess", e.postprocess);
  return e;
}

}  // namespace

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"corpus_dir", "sidecar_dir", "output_dir", "token_counter", "bpe_vocab", "bounds", "metrics",
              "portfolio", "embedding", "coref", "llm", "replay_dir", "workers"});
  RunConfig cfg;
  read_path(j, "corpus_dir", base_dir, cfg.corpus_dir);
  read_path(j, "sidecar_dir", base_dir, cfg.sidecar_dir);
  if (cfg.sidecar_dir.empty()) cfg.sidecar_dir = cfg.corpus_dir;
  cfg.output_dir = base_dir / cfg.output_dir;
  read_path(j, "output_dir", base_dir, cfg.output_dir);
  read(j, "token_counter", cfg.token_counter);
  read_path(j, "bpe_vocab", base_dir, cfg.bpe_vocab);
  read_path(j, "replay_dir", base_dir, cfg.replay_dir);
  read(j, "workers", cfg.workers);

  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    check_keys(b, "bounds", {"min", "max", "merge_cap"});
    read(b, "min", cfg.bounds.min);
    read(b, "max", cfg.bounds.max);
    read(b, "merge_cap", cfg.bounds.merge_cap);
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    check_keys(m, "metrics", {"bi_tolerance", "dcc_budget", "window_step", "enable_rc", "enable_icc", "enable_dcc"});
    read(m, "bi_tolerance", cfg.metrics.bi_tolerance);
    read(m, "dcc_budget", cfg.metrics.dcc_budget);
    read(m, "window_step", cfg.metrics.window_step);
    read(m, "enable_rc", cfg.metrics.enable_rc);
    read(m, "enable_icc", cfg.metrics.enable_icc);
    read(m, "enable_dcc", cfg.metrics.enable_dcc);
  }
  if (j.contains("portfolio")) {
    if (!j.at("portfolio").is_array()) throw ConfigError("portfolio must be an array");
    cfg.portfolio.clear();
    for (const auto& e : j.at("portfolio")) cfg.portfolio.push_back(entry_from_json(e));
  }
  if (j.contains("embedding")) {
    const json& e = j.at("embedding");
    check_keys(e, "embedding", {"provider", "url", "dimension", "batch_size", "api_key_env"});
    read(e, "provider", cfg.embedding.provider);
    read(e, "url", cfg.embedding.url);
    read(e, "dimension", cfg.embedding.dimension);
    read(e, "batch_size", cfg.embedding.batch_size);
    read(e, "api_key_env", cfg.embedding.api_key_env);
  }
  if (j.contains("coref")) {
    const json& c = j.at("coref");
    check_keys(c, "coref", {"url", "api_key_env"});
    read(c, "url", cfg.coref.url);
    read(c, "api_key_env", cfg.coref.api_key_env);
  }
  if (j.contains("llm")) {
    const json& l = j.at("llm");
    check_keys(l, "llm", {"url", "model", "api_key_env", "max_in_flight", "timeout_s"});
    read(l, "url", cfg.llm.url);
    read(l, "model", cfg.llm.model);
    read(l, "api_key_env", cfg.llm.api_key_env);
    read(l, "max_in_flight", cfg.llm.max_in_flight);
    read(l, "timeout_s", cfg.llm.timeout_s);
  }

  cfg.metrics.bounds = cfg.bounds;
  cfg.metrics.token_counter = cfg.token_counter;
  cfg.metrics.embedding_provider = cfg.embedding.provider;
  for (auto& e : cfg.portfolio) e.config.token_counter = cfg.token_counter;
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, fs::absolute(path).parent_path());
}

void RunConfig::validate() const {
  if (corpus_dir.empty()) throw ConfigError("corpus_dir is required");
  if (!fs::is_directory(corpus_dir)) throw ConfigError("corpus_dir " + corpus_dir.string() + " is not a directory");
  if (!fs::is_directory(sidecar_dir)) throw ConfigError("sidecar_dir " + sidecar_dir.string() + " is not a directory");
  if (!replay_dir.empty() && !fs::is_directory(replay_dir)) {
    throw ConfigError("replay_dir " + replay_dir.string() + " is not a directory");
  }
  if (!bpe_vocab.empty() && !fs::is_regular_file(bpe_vocab)) {
    throw ConfigError("bpe_vocab " + bpe_vocab.string() + " does not exist");
  }
  if (token_counter != WhitespaceCounter::kName && token_counter != BpeCounter::kName) {
    throw ConfigError("unknown token counter \"" + token_counter + "\"");
  }
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (llm.max_in_flight == 0) throw ConfigError("llm.max_in_flight must be at least 1");
  bounds.validate();
  metrics.validate();
  validate_portfolio(portfolio);
  if (embedding.provider == HashEmbedder::kName) {
    if (embedding.dimension == 0) throw ConfigError("embedding.dimension must be positive");
  } else if (embedding.provider == "remote") {
    if (embedding.url.empty()) throw ConfigError("embedding.url is required for the remote provider");
  } else {
    throw ConfigError("unknown embedding provider \"" + embedding.provider + "\"");
  }
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json portfolio = nlohmann::ordered_json::array();
  for (const auto& e : cfg.portfolio) {
    portfolio.push_back({{"name", e.name},
                         {"kind", to_string(e.kind)},
                         {"target_size", e.config.target_size},
                         {"overlap", e.config.overlap},
                         {"sentences_per_chunk", e.config.sentences_per_chunk},
                         {"sample_budget", e.config.sample_budget},
                         {"separator_cascade", e.config.separator_cascade},
                         {"postprocess", e.postprocess}});
  }
  return {{"corpus_dir", cfg.corpus_dir.string()},
          {"sidecar_dir", cfg.sidecar_dir.string()},
          {"output_dir", cfg.output_dir.string()},
          {"token_counter", cfg.token_counter},
          {"bpe_vocab", cfg.bpe_vocab.string()},
          {"bounds", {{"min", cfg.bounds.min}, {"max", cfg.bounds.max}, {"merge_cap", cfg.bounds.merge_cap}}},
          {"metrics",
           {{"bi_tolerance", cfg.metrics.bi_tolerance},
            {"dcc_budget", cfg.metrics.dcc_budget},
            {"window_step", cfg.metrics.window_step},
            {"enable_rc", cfg.metrics.enable_rc},
            {"enable_icc", cfg.metrics.enable_icc},
            {"enable_dcc", cfg.metrics.enable_dcc}}},
          {"portfolio", portfolio},
          {"embedding",
           {{"provider", cfg.embedding.provider},
            {"url", cfg.embedding.url},
            {"dimension", cfg.embedding.dimension},
            {"batch_size", cfg.embedding.batch_size},
            {"api_key_env", cfg.embedding.api_key_env}}},
          {"coref", {{"url", cfg.coref.url}, {"api_key_env", cfg.coref.api_key_env}}},
          {"llm",
           {{"url", cfg.llm.url},
            {"model", cfg.llm.model},
            {"api_key_env", cfg.llm.api_key_env},
            {"max_in_flight", cfg.llm.max_in_flight},
            {"timeout_s", cfg.llm.timeout_s}}},
          {"replay_dir", cfg.replay_dir.string()},
          {"workers", cfg.workers}};
}

}  // namespace adaptchunk::cli
