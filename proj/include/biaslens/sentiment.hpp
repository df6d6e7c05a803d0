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
#include "biaslens/classify.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/emotion.hpp"
#include "biaslens/error.hpp"
#include "biaslens/parallel.hpp"

namespace biaslens {

struct SentimentRecord {
  std::string url;
  EmotionDistribution distribution;
  Emotion dominant = Emotion::Neutral;

  bool operator==(const SentimentRecord& o) const {
    return url == o.url && distribution == o.distribution && dominant == o.dominant;
  }
};

inline nlohmann::json sentiment_to_json(const SentimentRecord& r) {
  nlohmann::json probs;
  for (Emotion e : kAllEmotions) probs[std::string(emotion_name(e))] = r.distribution[e];
  return nlohmann::json{{"url", r.url},
                        {"probs", probs},
                        {"dominant", std::string(emotion_name(r.dominant))}};
}

inline SentimentRecord sentiment_from_json(const nlohmann::json& j) {
  SentimentRecord r;
  r.url = j.at("url").get<std::string>();
  for (Emotion e : kAllEmotions)
    r.distribution[e] = j.at("probs").at(std::string(emotion_name(e))).get<double>();
  r.dominant = parse_emotion(j.at("dominant").get<std::string>());
  return r;
}

inline void save_sentiments(const std::vector<SentimentRecord>& records,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const auto& r : records) out << sentiment_to_json(r).dump() << '\n';
}

inline std::vector<SentimentRecord> load_sentiments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::vector<SentimentRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(sentiment_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::MalformedRecord,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

/// Scores each sliding window and takes the unweighted mean of the chunk
/// distributions; the dominant label is the derived argmax (ties neutral).
inline SentimentRecord analyze_article(const Article& article, EmotionBackend& backend,
                                       const ChunkingConfig& cfg) {
  const TokenSequence tokens = tokenize(article.content);
  const std::vector<ChunkSpan> spans = chunk(tokens, cfg);
  if (spans.empty()) throw Error(ErrorCode::EmptyInput, "no chunks for " + article.url);
  SentimentRecord record;
  record.url = article.url;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    EmotionDistribution d;
    try {
      d = backend.score_chunk(chunk_view(tokens, spans[i]));
    } catch (const Error& e) {
      throw Error(ErrorCode::BackendError,
                  article.url + " chunk " + std::to_string(i) + ": " + e.what());
    }
    for (Emotion e : kAllEmotions) record.distribution[e] += d[e];
  }
  for (Emotion e : kAllEmotions) record.distribution[e] /= double(spans.size());
  record.dominant = record.distribution.dominant();
  return record;
}

/// Append-only sentiment ledger keyed by (url, model_id), mirroring the
/// classification cache so warm re-runs make zero backend calls.
class SentimentCache {
 public:
  SentimentCache() = default;

  explicit SentimentCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (in) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        try {
          records_[j.at("model_id").get<std::string>() + "\x1f" + j.at("url").get<std::string>()] =
              sentiment_from_json(j);
        } catch (const std::exception&) {
          continue;
        }
      }
    }
  }

  std::optional<SentimentRecord> get(const std::string& url, const std::string& model_id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(model_id + "\x1f" + url);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  void put(const SentimentRecord& record, const std::string& model_id) {
    std::lock_guard lock(mutex_);
    records_[model_id + "\x1f" + record.url] = record;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot append cache " + path_);
    nlohmann::json j = sentiment_to_json(record);
    j["model_id"] = model_id;
    out << j.dump() << '\n';
  }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, SentimentRecord> records_;
};

struct SentimentRunResult {
  std::vector<SentimentRecord> records;  // sorted by url
  std::vector<ClassificationFailure> failures;
  std::size_t cache_hits = 0;
};

inline SentimentRunResult analyze_corpus(const Corpus& corpus, EmotionBackend& backend,
                                         const ChunkingConfig& cfg, SentimentCache& cache,
                                         int workers = 4, double failure_threshold = 0.25) {
  std::vector<const Article*> pending;
  SentimentRunResult result;
  for (const Article& article : corpus.articles) {
    if (auto hit = cache.get(article.url, backend.id())) {
      result.records.push_back(*hit);
      ++result.cache_hits;
    } else {
      pending.push_back(&article);
    }
  }
  std::mutex mutex;
  parallel_for(pending.size(), workers, [&](std::size_t i) {
    try {
      SentimentRecord record = analyze_article(*pending[i], backend, cfg);
      cache.put(record, backend.id());
      std::lock_guard lock(mutex);
      result.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex);
      result.failures.push_back({pending[i]->url, backend.id(), e.what()});
    }
  });
  if (!corpus.empty() &&
      double(result.failures.size()) / double(corpus.size()) > failure_threshold)
    throw Error(ErrorCode::PipelineAborted,
                std::to_string(result.failures.size()) + " sentiment failures");
  std::sort(result.records.begin(), result.records.end(),
            [](const SentimentRecord& a, const SentimentRecord& b) { return a.url < b.url; });
  return result;
}

enum class GroupField { Source, Conflict, Period, Leaning };

struct EmotionGroupRow {
  std::string group;
  EmotionDistribution mean;
  std::size_t n = 0;
};

struct EmotionAggregate {
  std::vector<EmotionGroupRow> rows;  // sorted by group key
  std::size_t join_misses = 0;        // reported, excluded
};

/// Mean emotion distribution per group. Sentiment records join to articles
/// by url (for source/conflict/period) and to one model's classifications
/// (for leaning); records that fail a needed join are counted and skipped.
/// Empty groups are omitted by construction.
inline EmotionAggregate aggregate(const std::vector<SentimentRecord>& sentiments,
                                  const std::vector<ClassificationRecord>& leanings,
                                  const Corpus& corpus,
                                  const std::map<Conflict, StudyWindow>& windows,
                                  const std::vector<GroupField>& group_by) {
  std::map<std::string, const Article*> by_url;
  for (const Article& a : corpus.articles) by_url[a.url] = &a;
  std::map<std::string, PoliticalLabel> leaning_by_url;
  for (const ClassificationRecord& r : leanings) leaning_by_url[r.url] = r.label;

  const bool needs_article =
      std::any_of(group_by.begin(), group_by.end(), [](GroupField f) {
        return f == GroupField::Source || f == GroupField::Conflict || f == GroupField::Period;
      });
  const bool needs_leaning =
      std::any_of(group_by.begin(), group_by.end(),
                  [](GroupField f) { return f == GroupField::Leaning; });

  struct Accumulator {
    EmotionDistribution total;
    std::size_t n = 0;
  };
  std::map<std::string, Accumulator> groups;
  EmotionAggregate out;

  std::size_t classified_only = 0;
  if (needs_leaning) {
    std::map<std::string, bool> sentiment_urls;
    for (const SentimentRecord& s : sentiments) sentiment_urls[s.url] = true;
    for (const auto& [url, label] : leaning_by_url) {
      (void)label;
      if (!sentiment_urls.count(url)) ++classified_only;
    }
  }

  for (const SentimentRecord& s : sentiments) {
    const Article* article = nullptr;
    if (needs_article) {
      auto it = by_url.find(s.url);
      if (it == by_url.end()) {
        ++out.join_misses;
        continue;
      }
      article = it->second;
    }
    std::optional<PoliticalLabel> leaning;
    if (needs_leaning) {
      auto it = leaning_by_url.find(s.url);
      if (it == leaning_by_url.end()) {
        ++out.join_misses;
        continue;
      }
      leaning = it->second;
    }
    std::string key;
    for (GroupField field : group_by) {
      if (!key.empty()) key.push_back('/');
      switch (field) {
        case GroupField::Source: key += article->source.slug(); break;
        case GroupField::Conflict: key += conflict_name(article->conflict); break;
        case GroupField::Period: {
          auto wit = windows.find(article->conflict);
          const StudyWindow window =
              wit != windows.end() ? wit->second : StudyWindow{};
          key += period_of(article->published_date, window) == Period::PreWar ? "prewar"
                                                                              : "duringwar";
          break;
        }
        case GroupField::Leaning: key += label_name(*leaning); break;
      }
    }
    if (key.empty()) key = "all";
    Accumulator& acc = groups[key];
    for (Emotion e : kAllEmotions) acc.total[e] += s.distribution[e];
    ++acc.n;
  }

  out.join_misses += classified_only;
  for (auto& [key, acc] : groups) {
    EmotionGroupRow row;
    row.group = key;
    row.n = acc.n;
    for (Emotion e : kAllEmotions) row.mean[e] = acc.total[e] / double(acc.n);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace biaslens
