#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaslens/backend.hpp"
#include "biaslens/chunking.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/error.hpp"
#include "biaslens/label.hpp"
#include "biaslens/parallel.hpp"
#include "biaslens/prompt.hpp"
#include "biaslens/ratelimit.hpp"

namespace biaslens {

enum class Strategy { ChunkVote, Prompt };

inline std::string_view strategy_name(Strategy s) {
  return s == Strategy::ChunkVote ? "ChunkVote" : "Prompt";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "ChunkVote" || s == "chunk") return Strategy::ChunkVote;
  if (s == "Prompt" || s == "prompt") return Strategy::Prompt;
  throw Error(ErrorCode::MalformedRecord, "unknown strategy: " + std::string(s));
}

struct ChunkPrediction {
  std::size_t chunk_index = 0;
  PoliticalLabel label = PoliticalLabel::Centre;
};

/// Final article-level judgment from one model.
struct ClassificationRecord {
  std::string url;
  std::string model_id;
  PoliticalLabel label = PoliticalLabel::Centre;
  std::vector<PoliticalLabel> run_labels;  // per chunk or per prompt run
  Strategy strategy = Strategy::Prompt;
  std::string prompt_version;

  bool operator==(const ClassificationRecord& o) const {
    return url == o.url && model_id == o.model_id && label == o.label &&
           run_labels == o.run_labels && strategy == o.strategy &&
           prompt_version == o.prompt_version;
  }
};

inline nlohmann::json classification_to_json(const ClassificationRecord& r) {
  nlohmann::json runs = nlohmann::json::array();
  for (PoliticalLabel l : r.run_labels) runs.push_back(std::string(label_name(l)));
  return nlohmann::json{{"url", r.url},
                        {"model_id", r.model_id},
                        {"label", std::string(label_name(r.label))},
                        {"run_labels", runs},
                        {"strategy", std::string(strategy_name(r.strategy))},
                        {"prompt_version", r.prompt_version}};
}

inline ClassificationRecord classification_from_json(const nlohmann::json& j) {
  ClassificationRecord r;
  r.url = j.at("url").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  auto label = parse_label(j.at("label").get<std::string>());
  if (!label) throw Error(ErrorCode::MalformedRecord, "bad label in record");
  r.label = *label;
  for (const auto& run : j.at("run_labels")) {
    auto l = parse_label(run.get<std::string>());
    if (!l) throw Error(ErrorCode::MalformedRecord, "bad run label in record");
    r.run_labels.push_back(*l);
  }
  r.strategy = parse_strategy(j.at("strategy").get<std::string>());
  r.prompt_version = j.value("prompt_version", "");
  return r;
}

inline void save_classifications(const std::vector<ClassificationRecord>& records,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const auto& r : records) out << classification_to_json(r).dump() << '\n';
}

inline std::vector<ClassificationRecord> load_classifications(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::vector<ClassificationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(classification_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::MalformedRecord,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

/// Chunk-vote strategy: label every sliding window and take the majority.
inline ClassificationRecord classify_chunked(const Article& article,
                                             ChunkLabelBackend& backend,
                                             const ChunkingConfig& cfg) {
  const TokenSequence tokens = tokenize(article.content);
  const std::vector<ChunkSpan> spans = chunk(tokens, cfg);
  if (spans.empty())
    throw Error(ErrorCode::EmptyInput, "no chunks for " + article.url);
  ClassificationRecord record;
  record.url = article.url;
  record.model_id = backend.id();
  record.strategy = Strategy::ChunkVote;
  record.run_labels.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    try {
      record.run_labels.push_back(backend.classify_chunk(chunk_view(tokens, spans[i])));
    } catch (const Error& e) {
      throw Error(ErrorCode::BackendError,
                  article.url + " chunk " + std::to_string(i) + ": " + e.what());
    }
  }
  record.label = vote(record.run_labels);
  return record;
}

/// Prompt strategy: R identical zero-temperature requests, majority over the
/// parsed labels. Retryable statuses and unparseable responses each get up
/// to policy.max_retries more attempts; runs still unparseable are excluded,
/// and an article with no parseable run at all raises AllRunsUnparseable.
inline ClassificationRecord classify_prompted(const Article& article,
                                              CompletionBackend& backend, int runs,
                                              RateLimiter& limiter,
                                              std::string_view prompt_version = "v1",
                                              RetryLog* log = nullptr) {
  if (runs < 1) throw Error(ErrorCode::ConfigError, "runs must be >= 1");
  const RatePolicy& policy = limiter.policy();
  BackendRequest request;
  request.text = build_prompt(article, prompt_version);
  request.temperature = 0.0;

  ClassificationRecord record;
  record.url = article.url;
  record.model_id = backend.id();
  record.strategy = Strategy::Prompt;
  record.prompt_version = std::string(prompt_version);

  for (int run = 0; run < runs; ++run) {
    std::optional<PoliticalLabel> parsed;
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
      BackendResponse response;
      {
        RateLimiter::Ticket ticket(limiter);
        response = backend.complete(request);
      }
      if (log) log->statuses.push_back(response.status);
      if (response.ok()) {
        parsed = parse_label(response.raw_text);
        if (parsed) break;
        // unparseable; retry below
      } else if (response.status == 401 || response.status == 403) {
        throw Error(ErrorCode::AuthError, "backend " + backend.id() + " rejected credentials");
      } else if (!is_retryable_status(response.status)) {
        throw Error(ErrorCode::TransportError,
                    "backend " + backend.id() + " status " + std::to_string(response.status));
      } else if (attempt == policy.max_retries) {
        if (response.status == 429)
          throw Error(ErrorCode::RateLimited, "backend " + backend.id() + " retries exhausted");
        throw Error(ErrorCode::TransportError,
                    "backend " + backend.id() + " retries exhausted (status " +
                        std::to_string(response.status) + ")");
      }
      if (attempt == policy.max_retries) break;  // unparseable runs out quietly
      if (log) ++log->retries;
      limiter.clock().sleep_ms(backoff_delay_ms(policy, attempt));
    }
    if (parsed) record.run_labels.push_back(*parsed);
  }
  if (record.run_labels.empty())
    throw Error(ErrorCode::AllRunsUnparseable, article.url + " via " + backend.id());
  record.label = vote(record.run_labels);
  return record;
}

/// Append-only JSONL ledger keyed by (url, model_id, prompt_version,
/// strategy); re-runs skip anything already recorded.
class ClassificationCache {
 public:
  ClassificationCache() = default;

  explicit ClassificationCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (in) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;  // torn tail write; ignore
        try {
          ClassificationRecord r = classification_from_json(j);
          records_[key_of(r)] = std::move(r);
        } catch (const Error&) {
          continue;
        }
      }
    }
  }

  static std::string key(const std::string& url, const std::string& model_id,
                         const std::string& prompt_version, Strategy strategy) {
    std::string k = url;
    k.push_back('\x1f');
    k += model_id;
    k.push_back('\x1f');
    k += prompt_version;
    k.push_back('\x1f');
    k += strategy_name(strategy);
    return k;
  }

  std::optional<ClassificationRecord> get(const std::string& url, const std::string& model_id,
                                          const std::string& prompt_version,
                                          Strategy strategy) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(key(url, model_id, prompt_version, strategy));
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  /// Serialized append; the ledger is the only shared mutable state.
  void put(const ClassificationRecord& record) {
    std::lock_guard lock(mutex_);
    records_[key_of(record)] = record;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot append cache " + path_);
    out << classification_to_json(record).dump() << '\n';
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
  }

 private:
  static std::string key_of(const ClassificationRecord& r) {
    return key(r.url, r.model_id, r.prompt_version, r.strategy);
  }

  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, ClassificationRecord> records_;
};

/// One configured political-leaning model.
struct PoliticalModel {
  std::string id;
  Strategy strategy = Strategy::Prompt;
  int runs = 3;                      // prompt repetitions; must stay odd
  std::string prompt_version = "v1";
  ChunkingConfig chunking;           // chunk-vote models
  std::shared_ptr<ChunkLabelBackend> chunk_backend;
  std::shared_ptr<CompletionBackend> completion_backend;
  std::shared_ptr<RateLimiter> limiter;
};

struct ClassificationFailure {
  std::string url;
  std::string model_id;
  std::string message;
};

struct ClassifyRunResult {
  std::vector<ClassificationRecord> records;  // sorted by (url, model_id)
  std::vector<ClassificationFailure> failures;
  std::size_t cache_hits = 0;
  std::size_t backend_tasks = 0;
};

/// Classifies every (article, model) pair with a bounded worker pool.
/// Cached pairs are never re-sent; output order is independent of
/// scheduling. Aborts only when the failure rate tops the threshold.
inline ClassifyRunResult classify_corpus(const Corpus& corpus,
                                         const std::vector<PoliticalModel>& models,
                                         ClassificationCache& cache, int workers = 4,
                                         double failure_threshold = 0.25) {
  struct Task {
    const Article* article;
    const PoliticalModel* model;
  };
  std::vector<Task> tasks;
  ClassifyRunResult result;
  for (const PoliticalModel& model : models) {
    for (const Article& article : corpus.articles) {
      const std::string version = model.strategy == Strategy::Prompt ? model.prompt_version : "";
      if (auto hit = cache.get(article.url, model.id, version, model.strategy)) {
        result.records.push_back(*hit);
        ++result.cache_hits;
      } else {
        tasks.push_back({&article, &model});
      }
    }
  }
  result.backend_tasks = tasks.size();

  std::mutex mutex;
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      ClassificationRecord record =
          task.model->strategy == Strategy::ChunkVote
              ? classify_chunked(*task.article, *task.model->chunk_backend,
                                 task.model->chunking)
              : classify_prompted(*task.article, *task.model->completion_backend,
                                  task.model->runs, *task.model->limiter,
                                  task.model->prompt_version);
      cache.put(record);
      std::lock_guard lock(mutex);
      result.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex);
      result.failures.push_back({task.article->url, task.model->id, e.what()});
    }
  });

  const std::size_t total = corpus.articles.size() * models.size();
  if (total > 0 && double(result.failures.size()) / double(total) > failure_threshold)
    throw Error(ErrorCode::PipelineAborted,
                std::to_string(result.failures.size()) + "/" + std::to_string(total) +
                    " classifications failed");

  std::sort(result.records.begin(), result.records.end(),
            [](const ClassificationRecord& a, const ClassificationRecord& b) {
              if (a.url != b.url) return a.url < b.url;
              return a.model_id < b.model_id;
            });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const ClassificationFailure& a, const ClassificationFailure& b) {
              if (a.url != b.url) return a.url < b.url;
              return a.model_id < b.model_id;
            });
  return result;
}

}  // namespace biaslens
