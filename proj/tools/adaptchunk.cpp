#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adaptchunk/cli.hpp"
#include "adaptchunk/error.hpp"

namespace ac = adaptchunk;
namespace cli = adaptchunk::cli;

namespace {

struct Overrides {
  std::string config;
  std::vector<std::string> methods;
  bool no_postprocess = false;
  std::string counter;
  std::string replay_dir;
  std::size_t workers = 0;
  std::string output;
};

cli::RunConfig resolve(const Overrides& o) {
  cli::RunConfig cfg = cli::load_run_config(o.config);
  if (!o.counter.empty()) {
    cfg.token_counter = o.counter;
    cfg.metrics.token_counter = o.counter;
    for (auto& e : cfg.portfolio) e.config.token_counter = o.counter;
  }
  if (!o.replay_dir.empty()) cfg.replay_dir = o.replay_dir;
  if (o.workers) cfg.workers = o.workers;
  if (!o.output.empty()) cfg.output_dir = o.output;
  return cfg;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--counter", o.counter, "token counter: whitespace or bpe-o200k");
  cmd->add_option("--workers", o.workers, "documents processed in parallel");
  cmd->add_option("--output", o.output, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive document chunking: chunk, score, select and report"};
  app.require_subcommand(1);
  Overrides o;
  std::string results;

  auto* chunk = app.add_subcommand("chunk", "chunk the corpus with portfolio methods");
  add_common(chunk, o);
  chunk->add_option("--method", o.methods, "portfolio entry to run (repeatable; default all)");
  chunk->add_flag("--no-postprocess", o.no_postprocess, "skip post-processing");
  chunk->add_option("--replay-dir", o.replay_dir, "replay LLM transcripts from this directory");

  auto* score = app.add_subcommand("score", "score chunk outputs");
  add_common(score, o);
  score->add_option("--method", o.methods, "chunk run label, e.g. page+pp (repeatable; default all)");

  auto* select = app.add_subcommand("select", "pick the best method per document");
  add_common(select, o);
  select->add_option("--method", o.methods, "restrict the portfolio (repeatable)");
  select->add_flag("--no-postprocess", o.no_postprocess, "skip post-processing");
  select->add_option("--replay-dir", o.replay_dir, "replay LLM transcripts from this directory");

  auto* report = app.add_subcommand("report", "render tables and histograms of a results directory");
  report->add_option("results", results, "results directory (the run's output_dir)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  try {
    if (*report) {
      const int code = cli::cmd_report(results);
      std::ifstream tables(std::filesystem::path(results) / "report" / "tables.txt");
      std::cout << tables.rdbuf();
      return code;
    }
    const cli::RunConfig cfg = resolve(o);
    const cli::ChunkOptions options{o.methods, o.no_postprocess};
    if (*chunk) return cli::cmd_chunk(cfg, options);
    if (*score) return cli::cmd_score(cfg, o.methods);
    return cli::cmd_select(cfg, options);
  } catch (const ac::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return cli::kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return cli::kPartialFailure;
  }
}
