#pragma once

#include <algorithm>
#include <chrono>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "biaslens/backend.hpp"
#include "biaslens/biasindex.hpp"
#include "biaslens/classify.hpp"
#include "biaslens/config.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/error.hpp"
#include "biaslens/hash.hpp"
#include "biaslens/ingest.hpp"
#include "biaslens/ngram.hpp"
#include "biaslens/report.hpp"
#include "biaslens/sentiment.hpp"

namespace biaslens {

/// Flag-level knobs; secrets stay in env vars.
struct RunOptions {
  bool offline = false;        // mock/file inputs only, no live HTTP
  bool strict = false;         // strict JSONL loads, zero failure tolerance
  bool deterministic = false;  // omit wall-clock timing from the manifest
  std::vector<std::string> model_filter;   // empty = all
  std::optional<Conflict> conflict_filter;
  std::optional<std::string> source_filter;  // matched against slug
};

namespace pipeline_detail {

inline bool model_selected(const RunOptions& opts, const std::string& id) {
  if (opts.model_filter.empty()) return true;
  return std::find(opts.model_filter.begin(), opts.model_filter.end(), id) !=
         opts.model_filter.end();
}

inline std::vector<DatasetConfig> selected_datasets(const PipelineConfig& cfg,
                                                    const RunOptions& opts) {
  std::vector<DatasetConfig> out;
  for (const DatasetConfig& d : cfg.datasets) {
    if (opts.conflict_filter && d.conflict != *opts.conflict_filter) continue;
    if (opts.source_filter && d.source.slug() != *opts.source_filter) continue;
    out.push_back(d);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "no dataset matches the filters");
  return out;
}

inline std::string raw_file(const std::string& out_dir, const DatasetConfig& d) {
  return (std::filesystem::path(out_dir) / ("raw_" + d.name + ".jsonl")).string();
}
inline std::string corpus_file(const std::string& out_dir, const DatasetConfig& d) {
  return (std::filesystem::path(out_dir) / ("corpus_" + d.name + ".jsonl")).string();
}
inline std::string classifications_file(const std::string& out_dir, const DatasetConfig& d) {
  return (std::filesystem::path(out_dir) / ("classifications_" + d.name + ".jsonl")).string();
}
inline std::string sentiments_file(const std::string& out_dir, const DatasetConfig& d,
                                   const std::string& model) {
  return (std::filesystem::path(out_dir) / ("sentiments_" + d.name + "_" + model + ".jsonl"))
      .string();
}

inline void require_input(const std::string& path, const std::string& producer) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::MissingStageInput,
                path + " (run `" + producer + "` first)");
}

inline Corpus load_stage_corpus(const std::string& path, const RunOptions& opts) {
  require_input(path, "clean");
  return load_corpus(path, opts.strict);
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace pipeline_detail

/// Holds the run directory exclusively; a second writer fails fast.
class RunLock {
 public:
  explicit RunLock(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    path_ = (std::filesystem::path(out_dir) / ".biaslens.lock").string();
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0)
      throw Error(ErrorCode::LockHeld, "run directory locked: " + path_);
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
  }
  ~RunLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

// --- backend construction -------------------------------------------------

inline std::shared_ptr<CompletionBackend> make_completion_backend(const ModelConfig& m,
                                                                  const PipelineConfig& cfg,
                                                                  const RunOptions& opts) {
  const BackendConfig& b = m.backend;
  if (b.type == "sim") return std::make_shared<SimCompletionBackend>(m.id, b.seed);
  if (b.type == "scripted")
    return std::make_shared<ScriptedCompletionBackend>(m.id, cfg.resolve(b.fixture));
  if (opts.offline)
    throw Error(ErrorCode::ConfigError, "model " + m.id + " needs HTTP but --offline is set");
  const auto provider = b.provider == "gemini" ? HttpCompletionBackend::Provider::GeminiLike
                                               : HttpCompletionBackend::Provider::OpenAiLike;
  return std::make_shared<HttpCompletionBackend>(m.id, b.base_url, b.model, provider);
}

inline std::shared_ptr<ChunkLabelBackend> make_chunk_backend(const ModelConfig& m,
                                                             const PipelineConfig& cfg,
                                                             const RunOptions& opts) {
  const BackendConfig& b = m.backend;
  if (b.type == "sim") return std::make_shared<SimChunkBackend>(m.id, b.seed);
  if (b.type == "scripted")
    return std::make_shared<ScriptedChunkBackend>(m.id, cfg.resolve(b.fixture));
  if (opts.offline)
    throw Error(ErrorCode::ConfigError, "model " + m.id + " needs HTTP but --offline is set");
  return std::make_shared<HttpChunkBackend>(m.id, b.base_url, b.model,
                                            b.path.empty() ? "/classify" : b.path);
}

inline std::shared_ptr<EmotionBackend> make_emotion_backend(const ModelConfig& m,
                                                            const PipelineConfig&,
                                                            const RunOptions& opts) {
  const BackendConfig& b = m.backend;
  if (b.type == "sim") return std::make_shared<SimEmotionBackend>(m.id, b.seed);
  if (b.type == "scripted")
    throw Error(ErrorCode::ConfigError, "scripted emotion backends are not supported; use sim");
  if (opts.offline)
    throw Error(ErrorCode::ConfigError, "model " + m.id + " needs HTTP but --offline is set");
  return std::make_shared<HttpEmotionBackend>(m.id, b.base_url, b.model,
                                              b.path.empty() ? "/emotion" : b.path);
}

inline std::vector<PoliticalModel> build_political_models(const PipelineConfig& cfg,
                                                          const RunOptions& opts) {
  std::vector<PoliticalModel> models;
  auto limiter = std::make_shared<RateLimiter>(cfg.rate_policy);
  for (const ModelConfig& m : cfg.models) {
    if (m.kind == ModelKind::Emotion) continue;
    if (!pipeline_detail::model_selected(opts, m.id)) continue;
    PoliticalModel model;
    model.id = m.id;
    model.runs = m.runs;
    model.prompt_version = m.prompt_version;
    model.chunking = cfg.chunking;
    model.limiter = limiter;
    if (m.kind == ModelKind::Chunk) {
      model.strategy = Strategy::ChunkVote;
      model.chunk_backend = make_chunk_backend(m, cfg, opts);
    } else {
      model.strategy = Strategy::Prompt;
      model.completion_backend = make_completion_backend(m, cfg, opts);
    }
    models.push_back(std::move(model));
  }
  if (models.empty())
    throw Error(ErrorCode::ConfigError, "no political model matches the filters");
  return models;
}

struct EmotionModel {
  std::string id;
  std::shared_ptr<EmotionBackend> backend;
};

inline std::vector<EmotionModel> build_emotion_models(const PipelineConfig& cfg,
                                                      const RunOptions& opts) {
  std::vector<EmotionModel> models;
  for (const ModelConfig& m : cfg.models) {
    if (m.kind != ModelKind::Emotion) continue;
    if (!pipeline_detail::model_selected(opts, m.id)) continue;
    models.push_back({m.id, make_emotion_backend(m, cfg, opts)});
  }
  return models;
}

// --- stages -----------------------------------------------------------------

/// Step 1a: acquire raw records (API, scraper, or bundled file) into the run
/// directory as raw_{dataset}.jsonl.
inline void run_ingest(const PipelineConfig& cfg, const RunOptions& opts) {
  namespace pd = pipeline_detail;
  std::filesystem::create_directories(cfg.out_dir);
  nlohmann::json report = nlohmann::json::object();

  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    std::vector<RawRecord> records;
    nlohmann::json dataset_report;

    std::shared_ptr<HttpTransport> transport;
    if (!d.cassette_replay.empty()) {
      transport = std::make_shared<ReplayTransport>(cfg.resolve(d.cassette_replay));
    } else if (d.mode != IngestMode::File) {
      if (opts.offline)
        throw Error(ErrorCode::ConfigError,
                    "dataset " + d.name + " needs live HTTP but --offline is set");
      transport = std::make_shared<HttplibTransport>();
      if (!d.cassette_record.empty())
        transport = std::make_shared<RecordingTransport>(transport,
                                                         cfg.resolve(d.cassette_record));
    }

    if (d.mode == IngestMode::File) {
      std::ifstream in(cfg.resolve(d.raw_path), std::ios::binary);
      if (!in) throw Error(ErrorCode::IoError, "cannot read " + cfg.resolve(d.raw_path));
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
          throw Error(ErrorCode::MalformedRecord,
                      d.raw_path + ":" + std::to_string(line_no) + ": bad JSON");
        RawRecord r;
        r.url = j.value("url", "");
        r.title = j.value("title", "");
        r.body = j.contains("body") ? j.value("body", "") : j.value("content", "");
        r.date = j.value("date", "");
        records.push_back(std::move(r));
      }
      dataset_report["fetched"] = records.size();
    } else if (d.mode == IngestMode::Api) {
      const char* key_env = std::getenv("BIASLENS_CONTENT_API_KEY");
      const std::string api_key = key_env ? key_env : "";
      TagQuery query{d.tags, d.window.start_date, d.window.end_date};
      RateLimiter limiter(cfg.rate_policy);
      RetryLog log;
      records = fetch_by_tags(*transport, d.endpoint, query, limiter, api_key, &log,
                              d.page_size);
      dataset_report["fetched"] = records.size();
      dataset_report["retries"] = log.retries;
    } else {
      auto urls = load_url_list(cfg.resolve(d.url_list));
      RateLimiter limiter(cfg.rate_policy);
      ScrapeResult scraped = scrape_urls(*transport, urls, d.keywords, limiter);
      records = std::move(scraped.records);
      dataset_report["fetched"] = records.size();
      dataset_report["failures"] = scraped.failures.size();
      dataset_report["filtered_out"] = scraped.filtered_out;
    }

    std::ofstream out(pd::raw_file(cfg.out_dir, d), std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write raw file for " + d.name);
    for (const RawRecord& r : records) out << raw_record_to_json(r).dump() << '\n';
    report[d.name] = dataset_report;
  }
  pd::write_json_file(
      (std::filesystem::path(cfg.out_dir) / "ingest_report.json").string(), report);
}

/// Step 1b: clean, filter and dedup raw records into corpus_{dataset}.jsonl.
inline void run_clean(const PipelineConfig& cfg, const RunOptions& opts) {
  namespace pd = pipeline_detail;
  nlohmann::json report = nlohmann::json::object();
  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    const std::string raw_path = pd::raw_file(cfg.out_dir, d);
    pd::require_input(raw_path, "ingest");
    std::vector<RawRecord> records;
    {
      std::ifstream in(raw_path, std::ios::binary);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        RawRecord r;
        r.url = j.value("url", "");
        r.title = j.value("title", "");
        r.body = j.value("body", "");
        r.date = j.value("date", "");
        records.push_back(std::move(r));
      }
    }
    ToArticlesReport to_report;
    Corpus corpus = to_articles(records, d.source, d.conflict, d.window, &to_report);
    const std::size_t before_cap = corpus.articles.size();
    corpus = filter_by_token_count(corpus, cfg.token_cap);
    corpus.provenance = "dataset " + d.name;
    save_corpus(corpus, pd::corpus_file(cfg.out_dir, d));

    nlohmann::json r;
    r["accepted"] = corpus.articles.size();
    r["rejected_empty"] = to_report.rejected_empty;
    r["rejected_non_english"] = to_report.rejected_non_english;
    r["rejected_garbage"] = to_report.rejected_garbage;
    r["missing_date"] = to_report.missing_date;
    r["out_of_window"] = to_report.out_of_window;
    r["duplicate_urls"] = to_report.duplicate_urls;
    r["over_token_cap"] = before_cap - corpus.articles.size();
    report[d.name] = r;
  }
  pd::write_json_file(
      (std::filesystem::path(cfg.out_dir) / "clean_report.json").string(), report);
}

/// Step 2: n-gram frequency tables per dataset.
inline void run_ngram(const PipelineConfig& cfg, const RunOptions& opts) {
  namespace pd = pipeline_detail;
  const StopwordConfig stop = cfg.stopwords();
  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    Corpus corpus = pd::load_stage_corpus(pd::corpus_file(cfg.out_dir, d), opts);
    for (std::size_t n : cfg.ngram_sizes) {
      auto rows = top_k(corpus, n, cfg.ngram_top, stop);
      const std::string name =
          table_filename(d.conflict, d.source, "ngram", detail::ngram_kind(n));
      write_ngram_csv(rows, (std::filesystem::path(cfg.out_dir) / name).string());
    }
  }
}

/// Steps 3-4: political-leaning classification with cache and worker pool.
inline void run_classify(const PipelineConfig& cfg, const RunOptions& opts) {
  namespace pd = pipeline_detail;
  auto models = build_political_models(cfg, opts);
  ClassificationCache cache((std::filesystem::path(cfg.out_dir) / "cache.jsonl").string());
  nlohmann::json report = nlohmann::json::object();
  const double threshold = opts.strict ? 0.0 : cfg.failure_threshold;

  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    Corpus corpus = pd::load_stage_corpus(pd::corpus_file(cfg.out_dir, d), opts);
    ClassifyRunResult result = classify_corpus(corpus, models, cache, cfg.workers, threshold);
    save_classifications(result.records, pd::classifications_file(cfg.out_dir, d));
    nlohmann::json r;
    r["records"] = result.records.size();
    r["cache_hits"] = result.cache_hits;
    r["backend_tasks"] = result.backend_tasks;
    nlohmann::json failures = nlohmann::json::array();
    for (const ClassificationFailure& f : result.failures)
      failures.push_back({{"url", f.url}, {"model", f.model_id}, {"error", f.message}});
    r["failures"] = failures;
    report[d.name] = r;
  }
  pd::write_json_file(
      (std::filesystem::path(cfg.out_dir) / "classify_report.json").string(), report);
}

/// Step 5: emotion analysis via the same windowing machinery.
inline void run_sentiment(const PipelineConfig& cfg, const RunOptions& opts) {
  namespace pd = pipeline_detail;
  auto models = build_emotion_models(cfg, opts);
  if (models.empty())
    throw Error(ErrorCode::ConfigError, "no emotion model configured");
  SentimentCache cache(
      (std::filesystem::path(cfg.out_dir) / "sentiment_cache.jsonl").string());
  const double threshold = opts.strict ? 0.0 : cfg.failure_threshold;

  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    Corpus corpus = pd::load_stage_corpus(pd::corpus_file(cfg.out_dir, d), opts);
    for (const EmotionModel& model : models) {
      SentimentRunResult result =
          analyze_corpus(corpus, *model.backend, cfg.chunking, cache, cfg.workers, threshold);
      save_sentiments(result.records, pd::sentiments_file(cfg.out_dir, d, model.id));
    }
  }
}

/// Builds the full aggregate set for one dataset from the stage artifacts.
inline DatasetAggregates build_aggregates(const PipelineConfig& cfg, const RunOptions& opts,
                                          const DatasetConfig& d) {
  namespace pd = pipeline_detail;
  DatasetAggregates agg;
  agg.source = d.source;
  agg.conflict = d.conflict;

  Corpus corpus = pd::load_stage_corpus(pd::corpus_file(cfg.out_dir, d), opts);
  const std::string cls_path = pd::classifications_file(cfg.out_dir, d);
  pd::require_input(cls_path, "classify");
  std::vector<ClassificationRecord> records = load_classifications(cls_path);

  std::map<Conflict, StudyWindow> windows{{d.conflict, d.window}};
  agg.summaries = period_summary(records, corpus, windows);

  std::vector<EventAnnotation> events;
  if (!cfg.events_path.empty()) events = load_events(cfg.resolve(cfg.events_path));

  std::set<std::string> model_ids;
  for (const ClassificationRecord& r : records) model_ids.insert(r.model_id);
  for (const std::string& model : model_ids) {
    std::vector<ClassificationRecord> own;
    for (const ClassificationRecord& r : records)
      if (r.model_id == model) own.push_back(r);
    agg.weekly_index[model] = time_series(own, corpus, Bucket::Weekly, events);
    agg.monthly_diff[model] = time_series(own, corpus, Bucket::Monthly, events);
  }

  // Emotion tables join the first configured emotion model's records against
  // each political model's labels; mean and dominant views are both emitted.
  auto emotion_models = build_emotion_models(cfg, opts);
  if (!emotion_models.empty()) {
    const std::string sent_path =
        pd::sentiments_file(cfg.out_dir, d, emotion_models.front().id);
    pd::require_input(sent_path, "sentiment");
    std::vector<SentimentRecord> sentiments = load_sentiments(sent_path);
    for (const std::string& model : model_ids) {
      std::vector<ClassificationRecord> own;
      for (const ClassificationRecord& r : records)
        if (r.model_id == model) own.push_back(r);
      EmotionAggregate mean_rows =
          aggregate(sentiments, own, corpus, windows,
                    {GroupField::Period, GroupField::Leaning});
      std::vector<EmotionGroupRow> rows;
      for (EmotionGroupRow& row : mean_rows.rows) {
        row.group += "/mean";
        rows.push_back(row);
      }
      // dominant-label histogram per group
      std::map<std::string, const Article*> by_url;
      for (const Article& a : corpus.articles) by_url[a.url] = &a;
      std::map<std::string, PoliticalLabel> leaning_by_url;
      for (const ClassificationRecord& r : own) leaning_by_url[r.url] = r.label;
      struct Hist {
        std::array<std::size_t, 7> counts{};
        std::size_t n = 0;
      };
      std::map<std::string, Hist> hists;
      for (const SentimentRecord& s : sentiments) {
        auto ait = by_url.find(s.url);
        auto lit = leaning_by_url.find(s.url);
        if (ait == by_url.end() || lit == leaning_by_url.end()) continue;
        const std::string period =
            period_of(ait->second->published_date, d.window) == Period::PreWar ? "prewar"
                                                                               : "duringwar";
        Hist& h = hists[period + "/" + std::string(label_name(lit->second))];
        ++h.counts[std::size_t(s.dominant)];
        ++h.n;
      }
      for (const auto& [key, h] : hists) {
        EmotionGroupRow row;
        row.group = key + "/dominant";
        row.n = h.n;
        for (Emotion e : kAllEmotions)
          row.mean[e] = double(h.counts[std::size_t(e)]) / double(h.n);
        rows.push_back(std::move(row));
      }
      std::sort(rows.begin(), rows.end(),
                [](const EmotionGroupRow& a, const EmotionGroupRow& b) {
                  return a.group < b.group;
                });
      agg.emotion[model] = std::move(rows);
    }
  }

  const StopwordConfig stop = cfg.stopwords();
  for (std::size_t n : cfg.ngram_sizes) {
    if (!corpus.empty()) agg.ngrams[n] = top_k(corpus, n, cfg.ngram_top, stop);
  }
  return agg;
}

/// Step 6 part 1: summary tables and index/difference series per dataset.
inline void run_index(const PipelineConfig& cfg, const RunOptions& opts) {
  namespace pd = pipeline_detail;
  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    Corpus corpus = pd::load_stage_corpus(pd::corpus_file(cfg.out_dir, d), opts);
    const std::string cls_path = pd::classifications_file(cfg.out_dir, d);
    pd::require_input(cls_path, "classify");
    std::vector<ClassificationRecord> records = load_classifications(cls_path);
    std::map<Conflict, StudyWindow> windows{{d.conflict, d.window}};

    std::vector<EventAnnotation> events;
    if (!cfg.events_path.empty()) events = load_events(cfg.resolve(cfg.events_path));

    auto summaries = period_summary(records, corpus, windows);
    std::set<std::string> model_ids;
    for (const ClassificationRecord& r : records) model_ids.insert(r.model_id);
    for (const std::string& model : model_ids) {
      std::vector<PeriodSummary> own_summaries;
      for (const PeriodSummary& s : summaries)
        if (s.model_id == model) own_summaries.push_back(s);
      std::vector<ClassificationRecord> own;
      for (const ClassificationRecord& r : records)
        if (r.model_id == model) own.push_back(r);
      const std::filesystem::path dir(cfg.out_dir);
      write_summary_csv(own_summaries,
                        (dir / table_filename(d.conflict, d.source, model, "summary")).string());
      write_series_csv(time_series(own, corpus, Bucket::Weekly, events),
                       (dir / table_filename(d.conflict, d.source, model, "weekly-index")).string());
      write_series_csv(time_series(own, corpus, Bucket::Monthly, events),
                       (dir / table_filename(d.conflict, d.source, model, "monthly-diff")).string());
    }
  }
}

/// Step 6 part 2: every table and chart plus the run manifest.
inline void run_report(const PipelineConfig& cfg, const RunOptions& opts,
                       double duration_seconds = 0.0) {
  namespace pd = pipeline_detail;
  std::vector<std::string> files;
  RunManifest manifest;
  manifest.config_snapshot = cfg.snapshot;
  manifest.include_timing = !opts.deterministic;
  manifest.duration_seconds = duration_seconds;

  Corpus union_corpus;
  std::vector<ClassificationRecord> all_records;
  std::map<Conflict, StudyWindow> all_windows;
  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    DatasetAggregates agg = build_aggregates(cfg, opts, d);
    for (std::string& f : emit_tables(agg, cfg.out_dir, &manifest.warnings))
      files.push_back(std::move(f));
    for (std::string& f : emit_charts(agg, cfg.out_dir))
      files.push_back(std::move(f));
    Corpus corpus = pd::load_stage_corpus(pd::corpus_file(cfg.out_dir, d), opts);
    manifest.corpus_fingerprints[d.name] = corpus_fingerprint(corpus);
    for (ClassificationRecord& r :
         load_classifications(pd::classifications_file(cfg.out_dir, d)))
      all_records.push_back(std::move(r));
    for (Article& a : corpus.articles) union_corpus.articles.push_back(std::move(a));
    all_windows[d.conflict] = d.window;
  }

  // per-outlet and pooled average scores in one table
  write_scores_csv(bias_score_table(all_records, union_corpus, all_windows),
                   (std::filesystem::path(cfg.out_dir) / "bias_scores.csv").string());
  files.push_back("bias_scores.csv");

  for (const ModelConfig& m : cfg.models) {
    if (!pipeline_detail::model_selected(opts, m.id)) continue;
    nlohmann::json model = {{"id", m.id}};
    switch (m.kind) {
      case ModelKind::Chunk: model["strategy"] = "chunk"; break;
      case ModelKind::Prompt:
        model["strategy"] = "prompt";
        model["prompt_version"] = m.prompt_version;
        model["runs"] = m.runs;
        break;
      case ModelKind::Emotion: model["strategy"] = "emotion"; break;
    }
    manifest.models.push_back(model);
  }

  // stage artifacts belong to the output list as well
  for (const DatasetConfig& d : pd::selected_datasets(cfg, opts)) {
    for (const std::string& path :
         {pd::raw_file(cfg.out_dir, d), pd::corpus_file(cfg.out_dir, d),
          pd::classifications_file(cfg.out_dir, d)}) {
      if (std::filesystem::exists(path))
        files.push_back(std::filesystem::path(path).filename().string());
    }
    for (const EmotionModel& m : build_emotion_models(cfg, opts)) {
      const std::string path = pd::sentiments_file(cfg.out_dir, d, m.id);
      if (std::filesystem::exists(path))
        files.push_back(std::filesystem::path(path).filename().string());
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  manifest.output_files = files;

  std::string fingerprint = cfg.snapshot.dump() + manifest.corpus_fingerprints.dump();
  manifest.run_id = to_hex(fnv1a64(fingerprint));
  write_manifest(manifest, cfg.out_dir);
}

/// Steps 1-6 in sequence; equivalent to running the individual commands.
inline void run_all(const PipelineConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  run_ingest(cfg, opts);
  run_clean(cfg, opts);
  run_ngram(cfg, opts);
  run_classify(cfg, opts);
  run_sentiment(cfg, opts);
  run_index(cfg, opts);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run_report(cfg, opts, elapsed);
}

}  // namespace biaslens
