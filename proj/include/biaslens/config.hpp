#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaslens/chunking.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/error.hpp"
#include "biaslens/ingest.hpp"
#include "biaslens/ngram.hpp"
#include "biaslens/ratelimit.hpp"

namespace biaslens {

enum class IngestMode { Api, Scrape, File };

struct DatasetConfig {
  std::string name;  // file-name slug, e.g. "guardian-ru"
  Source source;
  Conflict conflict = Conflict::RussiaUkraine;
  StudyWindow window;
  KeywordSet keywords;
  std::vector<std::string> tags;
  IngestMode mode = IngestMode::File;
  std::string endpoint;       // api mode
  int page_size = 50;         // api mode
  std::string url_list;       // scrape mode
  std::string raw_path;       // file mode: pre-fetched raw records JSONL
  std::string cassette_record;
  std::string cassette_replay;
};

struct BackendConfig {
  std::string type = "sim";  // sim | scripted | http
  std::uint64_t seed = 0;
  std::string fixture;    // scripted
  std::string base_url;   // http
  std::string model;      // http
  std::string provider = "openai";  // http completion shape
  std::string path;       // http chunk/emotion endpoint path
};

enum class ModelKind { Chunk, Prompt, Emotion };

struct ModelConfig {
  std::string id;
  ModelKind kind = ModelKind::Prompt;
  int runs = 3;  // prompt repetitions; odd
  std::string prompt_version = "v1";
  BackendConfig backend;
};

/// The single declarative file driving a run. Flags override individual
/// fields; env vars carry only secrets.
struct PipelineConfig {
  std::string out_dir = "runs/out";
  ChunkingConfig chunking;
  RatePolicy rate_policy;
  int workers = 4;
  double failure_threshold = 0.25;
  std::string events_path;
  std::optional<std::string> stopword_file;
  std::vector<std::string> custom_stopwords{"say", "state", "old", "tell", "bst", "gmt"};
  std::vector<std::size_t> ngram_sizes{2, 3};
  std::size_t ngram_top = 20;
  std::size_t token_cap = 10000;
  std::vector<DatasetConfig> datasets;
  std::vector<ModelConfig> models;

  nlohmann::json snapshot;               // verbatim config for the manifest
  std::filesystem::path base_dir = ".";  // config file directory

  /// Paths in the config are relative to the config file.
  std::string resolve(const std::string& path) const {
    if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (base_dir / path).lexically_normal().string();
  }

  StopwordConfig stopwords() const {
    StopwordConfig cfg = StopwordConfig::defaults();
    if (stopword_file) cfg.load_standard_from_file(resolve(*stopword_file));
    for (const std::string& w : custom_stopwords) cfg.add_custom(w);
    return cfg;
  }

  std::map<Conflict, StudyWindow> windows() const {
    std::map<Conflict, StudyWindow> map;
    for (const DatasetConfig& d : datasets) map[d.conflict] = d.window;
    return map;
  }

  static PipelineConfig load(const std::string& path);
  void validate() const;
};

namespace detail {

inline Date date_field(const nlohmann::json& j, const char* key, Date fallback) {
  if (!j.contains(key)) return fallback;
  return Date::parse_or_throw(j.at(key).get<std::string>());
}

inline DatasetConfig parse_dataset(const nlohmann::json& j) {
  DatasetConfig d;
  if (!j.contains("source") || !j.contains("conflict"))
    throw Error(ErrorCode::ConfigError, "dataset needs source and conflict");
  d.source = Source::parse(j.at("source").get<std::string>());
  auto conflict = parse_conflict(j.at("conflict").get<std::string>());
  if (!conflict) throw Error(ErrorCode::ConfigError, "unknown conflict in dataset");
  d.conflict = *conflict;
  d.name = j.value("name", std::string(conflict_name(d.conflict)) + "-" + d.source.slug());

  const nlohmann::json window = j.value("window", nlohmann::json::object());
  d.window.start_date = date_field(window, "start", Date(2020, 1, 1));
  d.window.end_date = date_field(window, "end", Date(2024, 12, 31));
  d.window.war_start_date = date_field(window, "war_start", default_war_start(d.conflict));
  if (!d.window.valid())
    throw Error(ErrorCode::ConfigError, "dataset " + d.name + " window invalid");

  d.keywords = KeywordSet::defaults(d.conflict);
  if (j.contains("keywords")) {
    d.keywords.keywords.clear();
    for (const auto& k : j.at("keywords")) d.keywords.keywords.push_back(k.get<std::string>());
    if (d.keywords.keywords.empty())
      throw Error(ErrorCode::ConfigError, "dataset " + d.name + " keyword set empty");
  }
  if (j.contains("tags"))
    for (const auto& t : j.at("tags")) d.tags.push_back(t.get<std::string>());

  const nlohmann::json ingest = j.value("ingest", nlohmann::json::object());
  const std::string mode = ingest.value("mode", "file");
  if (mode == "api") {
    d.mode = IngestMode::Api;
    d.endpoint = ingest.value("endpoint", "");
    d.page_size = ingest.value("page_size", 50);
    if (d.endpoint.empty())
      throw Error(ErrorCode::ConfigError, "api ingest needs an endpoint");
    if (d.tags.empty())
      throw Error(ErrorCode::ConfigError, "api ingest needs tags");
  } else if (mode == "scrape") {
    d.mode = IngestMode::Scrape;
    d.url_list = ingest.value("url_list", "");
    if (d.url_list.empty())
      throw Error(ErrorCode::ConfigError, "scrape ingest needs url_list");
  } else if (mode == "file") {
    d.mode = IngestMode::File;
    d.raw_path = ingest.value("path", "");
    if (d.raw_path.empty())
      throw Error(ErrorCode::ConfigError, "file ingest needs path");
  } else {
    throw Error(ErrorCode::ConfigError, "unknown ingest mode " + mode);
  }
  d.cassette_record = ingest.value("cassette_record", "");
  d.cassette_replay = ingest.value("cassette_replay", "");
  return d;
}

inline BackendConfig parse_backend(const nlohmann::json& j) {
  BackendConfig b;
  b.type = j.value("type", "sim");
  b.seed = j.value("seed", std::uint64_t{0});
  b.fixture = j.value("fixture", "");
  b.base_url = j.value("base_url", "");
  b.model = j.value("model", "");
  b.provider = j.value("provider", "openai");
  b.path = j.value("path", "");
  if (b.type == "scripted" && b.fixture.empty())
    throw Error(ErrorCode::ConfigError, "scripted backend needs a fixture");
  if (b.type == "http" && b.base_url.empty())
    throw Error(ErrorCode::ConfigError, "http backend needs base_url");
  if (b.type != "sim" && b.type != "scripted" && b.type != "http")
    throw Error(ErrorCode::ConfigError, "unknown backend type " + b.type);
  return b;
}

inline ModelConfig parse_model(const nlohmann::json& j) {
  ModelConfig m;
  m.id = j.value("id", "");
  if (m.id.empty()) throw Error(ErrorCode::ConfigError, "model needs an id");
  const std::string strategy = j.value("strategy", "prompt");
  if (strategy == "chunk") m.kind = ModelKind::Chunk;
  else if (strategy == "prompt") m.kind = ModelKind::Prompt;
  else if (strategy == "emotion") m.kind = ModelKind::Emotion;
  else throw Error(ErrorCode::ConfigError, "unknown strategy " + strategy + " for " + m.id);
  m.runs = j.value("runs", 3);
  if (m.kind == ModelKind::Prompt && (m.runs < 1 || m.runs % 2 == 0))
    throw Error(ErrorCode::ConfigError, "model " + m.id + " runs must be odd and >= 1");
  m.prompt_version = j.value("prompt_version", "v1");
  m.backend = parse_backend(j.value("backend", nlohmann::json::object()));
  return m;
}

}  // namespace detail

inline PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config parse: ") + e.what());
  }

  PipelineConfig cfg;
  cfg.snapshot = j;
  cfg.base_dir = std::filesystem::absolute(std::filesystem::path(path)).parent_path();
  cfg.out_dir = j.value("out_dir", cfg.out_dir);

  if (j.contains("chunking")) {
    cfg.chunking.window = j.at("chunking").value("window", std::size_t{512});
    cfg.chunking.stride = j.at("chunking").value("stride", std::size_t{256});
  }
  if (j.contains("rate_policy")) {
    const auto& rp = j.at("rate_policy");
    cfg.rate_policy.max_concurrent = rp.value("max_concurrent", 4);
    cfg.rate_policy.min_interval_ms = rp.value("min_interval_ms", std::int64_t{0});
    cfg.rate_policy.max_retries = rp.value("max_retries", 3);
    cfg.rate_policy.base_backoff_ms = rp.value("base_backoff_ms", std::int64_t{250});
    cfg.rate_policy.max_backoff_ms = rp.value("max_backoff_ms", std::int64_t{30000});
  }
  cfg.workers = j.value("workers", 4);
  cfg.failure_threshold = j.value("failure_threshold", 0.25);
  cfg.events_path = j.value("events", "");
  if (j.contains("stopwords")) {
    const auto& sw = j.at("stopwords");
    if (sw.contains("standard_file") && sw.at("standard_file").is_string())
      cfg.stopword_file = sw.at("standard_file").get<std::string>();
    if (sw.contains("custom")) {
      cfg.custom_stopwords.clear();
      for (const auto& w : sw.at("custom")) cfg.custom_stopwords.push_back(w.get<std::string>());
    }
  }
  if (j.contains("ngram")) {
    const auto& ng = j.at("ngram");
    if (ng.contains("sizes")) {
      cfg.ngram_sizes.clear();
      for (const auto& n : ng.at("sizes")) cfg.ngram_sizes.push_back(n.get<std::size_t>());
    }
    cfg.ngram_top = ng.value("top", std::size_t{20});
  }
  cfg.token_cap = j.value("token_cap", std::size_t{10000});

  for (const auto& d : j.value("datasets", nlohmann::json::array()))
    cfg.datasets.push_back(detail::parse_dataset(d));
  for (const auto& m : j.value("models", nlohmann::json::array()))
    cfg.models.push_back(detail::parse_model(m));

  cfg.validate();
  return cfg;
}

inline void PipelineConfig::validate() const {
  if (datasets.empty()) throw Error(ErrorCode::ConfigError, "config needs at least one dataset");
  bool any_political = false;
  for (const ModelConfig& m : models)
    any_political = any_political || m.kind != ModelKind::Emotion;
  if (!any_political)
    throw Error(ErrorCode::ConfigError, "config needs at least one political model");
  chunking.validate();
  rate_policy.validate();
  if (workers < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
  if (token_cap < 1) throw Error(ErrorCode::ConfigError, "token_cap must be >= 1");
  for (std::size_t n : ngram_sizes)
    if (n < 1) throw Error(ErrorCode::ConfigError, "ngram size must be >= 1");

  // referenced paths must exist at load
  auto must_exist = [&](const std::string& path, const std::string& what) {
    if (path.empty()) return;
    if (!std::filesystem::exists(resolve(path)))
      throw Error(ErrorCode::ConfigError, what + " not found: " + resolve(path));
  };
  must_exist(events_path, "events file");
  if (stopword_file) must_exist(*stopword_file, "stopword file");
  for (const DatasetConfig& d : datasets) {
    if (d.mode == IngestMode::File) must_exist(d.raw_path, "dataset " + d.name + " raw file");
    if (d.mode == IngestMode::Scrape) must_exist(d.url_list, "dataset " + d.name + " url list");
    must_exist(d.cassette_replay, "dataset " + d.name + " cassette");
  }
  for (const ModelConfig& m : models)
    if (m.backend.type == "scripted") must_exist(m.backend.fixture, "model " + m.id + " fixture");

  std::set<std::string> names;
  for (const DatasetConfig& d : datasets)
    if (!names.insert(d.name).second)
      throw Error(ErrorCode::ConfigError, "duplicate dataset name " + d.name);
  std::set<std::string> ids;
  for (const ModelConfig& m : models)
    if (!ids.insert(m.id).second)
      throw Error(ErrorCode::ConfigError, "duplicate model id " + m.id);
}

}  // namespace biaslens
