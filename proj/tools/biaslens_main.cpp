// biaslens: media political-bias analysis pipeline CLI.
//
// One subcommand per pipeline step plus `run-all`; a single JSON config
// drives everything, flags override, env vars carry only secrets
// (BIASLENS_CONTENT_API_KEY, BIASLENS_LLM_API_KEY).

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/config.hpp"
#include "biaslens/error.hpp"
#include "biaslens/pipeline.hpp"

namespace {

struct CliArgs {
  std::string config_path = "biaslens.json";
  std::string out_dir;
  std::string models;
  std::string conflict;
  std::string source;
  bool offline = false;
  bool strict = false;
  bool deterministic = false;
};

std::vector<std::string> split_csv_list(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  for (char c : list) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

int exit_code_for(const biaslens::Error& e) {
  switch (e.code()) {
    case biaslens::ErrorCode::MissingStageInput: return 2;
    case biaslens::ErrorCode::ConfigError: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biaslens - political bias and emotion analysis of news corpora"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CliArgs args;
  app.add_option("--config", args.config_path, "Pipeline config file (JSON)");
  app.add_option("--out", args.out_dir, "Run directory (overrides config out_dir)");
  app.add_option("--models", args.models, "Comma-separated model id filter");
  app.add_option("--conflict", args.conflict, "Dataset filter: russia-ukraine | israel-hamas");
  app.add_option("--source", args.source, "Dataset filter by source slug (bbc, guardian)");
  app.add_flag("--offline", args.offline, "Mock backends and bundled inputs only");
  app.add_flag("--strict", args.strict, "Strict record loading, zero failure tolerance");
  app.add_flag("--deterministic", args.deterministic,
               "Byte-reproducible outputs (omit wall-clock timing from run.json)");

  std::size_t ngram_n = 0;       // 0 = config default
  std::size_t ngram_top = 0;
  auto* cmd_ingest = app.add_subcommand("ingest", "Step 1a: fetch raw articles");
  auto* cmd_clean = app.add_subcommand("clean", "Step 1b: clean and filter into a corpus");
  auto* cmd_ngram = app.add_subcommand("ngram", "Step 2: n-gram frequency tables");
  cmd_ngram->add_option("--n", ngram_n, "n-gram size (2 or 3)");
  cmd_ngram->add_option("--top", ngram_top, "table length K");
  auto* cmd_classify = app.add_subcommand("classify", "Steps 3-4: political leaning labels");
  auto* cmd_sentiment = app.add_subcommand("sentiment", "Step 5: emotion analysis");
  auto* cmd_index = app.add_subcommand("index", "Step 6a: summaries and bias index series");
  auto* cmd_report = app.add_subcommand("report", "Step 6b: tables, charts, run manifest");
  auto* cmd_run_all = app.add_subcommand("run-all", "Steps 1-6 in sequence");

  CLI11_PARSE(app, argc, argv);

  try {
    biaslens::PipelineConfig cfg = biaslens::PipelineConfig::load(args.config_path);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (ngram_n != 0) cfg.ngram_sizes = {ngram_n};
    if (ngram_top != 0) cfg.ngram_top = ngram_top;

    biaslens::RunOptions opts;
    opts.offline = args.offline;
    opts.strict = args.strict;
    opts.deterministic = args.deterministic;
    opts.model_filter = split_csv_list(args.models);
    if (!args.conflict.empty()) {
      auto conflict = biaslens::parse_conflict(args.conflict);
      if (!conflict)
        throw biaslens::Error(biaslens::ErrorCode::ConfigError,
                              "unknown conflict " + args.conflict);
      opts.conflict_filter = *conflict;
    }
    if (!args.source.empty())
      opts.source_filter = biaslens::Source::parse(args.source).slug();

    biaslens::RunLock lock(cfg.out_dir);
    if (cmd_ingest->parsed()) biaslens::run_ingest(cfg, opts);
    else if (cmd_clean->parsed()) biaslens::run_clean(cfg, opts);
    else if (cmd_ngram->parsed()) biaslens::run_ngram(cfg, opts);
    else if (cmd_classify->parsed()) biaslens::run_classify(cfg, opts);
    else if (cmd_sentiment->parsed()) biaslens::run_sentiment(cfg, opts);
    else if (cmd_index->parsed()) biaslens::run_index(cfg, opts);
    else if (cmd_report->parsed()) biaslens::run_report(cfg, opts);
    else if (cmd_run_all->parsed()) biaslens::run_all(cfg, opts);
  } catch (const biaslens::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
