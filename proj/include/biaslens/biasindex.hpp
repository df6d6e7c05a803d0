#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "biaslens/classify.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/csv.hpp"
#include "biaslens/date.hpp"
#include "biaslens/error.hpp"
#include "biaslens/label.hpp"

namespace biaslens {

/// Numeric encoding of a leaning: Left -1, Centre 0, Right +1.
inline int encode(PoliticalLabel label) {
  switch (label) {
    case PoliticalLabel::Left: return -1;
    case PoliticalLabel::Centre: return 0;
    case PoliticalLabel::Right: return 1;
  }
  return 0;
}

/// Mean encoded score of a non-empty label set, computed through the label
/// proportions so it coincides bit-for-bit with P(Right) - P(Left).
inline double avg_score(std::span<const PoliticalLabel> labels) {
  if (labels.empty()) throw Error(ErrorCode::EmptySubset, "avg_score over empty subset");
  std::size_t right = 0, left = 0;
  for (PoliticalLabel l : labels) {
    if (l == PoliticalLabel::Right) ++right;
    else if (l == PoliticalLabel::Left) ++left;
  }
  const double n = double(labels.size());
  return double(right) / n - double(left) / n;
}

inline double avg_score(const std::vector<PoliticalLabel>& labels) {
  return avg_score(std::span<const PoliticalLabel>(labels));
}

/// Label proportions for one (source, conflict, period, model) cell.
struct PeriodSummary {
  Source source;
  Conflict conflict = Conflict::RussiaUkraine;
  Period period = Period::PreWar;
  std::string model_id;
  std::map<PoliticalLabel, double> proportions;
  std::size_t n_articles = 0;

  double proportion(PoliticalLabel l) const {
    auto it = proportions.find(l);
    return it == proportions.end() ? 0.0 : it->second;
  }
};

/// P(Right) - P(Left); negative territory is Left-leaning.
inline double rl_difference(const PeriodSummary& summary) {
  return summary.proportion(PoliticalLabel::Right) - summary.proportion(PoliticalLabel::Left);
}

/// Builds per-(source, conflict, period, model) label proportions. Every
/// record url must resolve to a corpus article; empty cells never appear.
inline std::vector<PeriodSummary> period_summary(
    const std::vector<ClassificationRecord>& records, const Corpus& corpus,
    const std::map<Conflict, StudyWindow>& windows) {
  std::map<std::string, const Article*> by_url;
  for (const Article& a : corpus.articles) by_url[a.url] = &a;

  struct Cell {
    std::array<std::size_t, 3> counts{0, 0, 0};
    std::size_t n = 0;
  };
  // key: source slug, conflict, period, model — kept sortable and readable
  std::map<std::tuple<std::string, int, int, std::string>, Cell> cells;
  std::map<std::string, Source> sources;

  for (const ClassificationRecord& r : records) {
    auto it = by_url.find(r.url);
    if (it == by_url.end())
      throw Error(ErrorCode::DanglingRecord, r.url + " not present in corpus");
    const Article& a = *it->second;
    auto wit = windows.find(a.conflict);
    const StudyWindow window = wit != windows.end() ? wit->second : StudyWindow{};
    const Period period = period_of(a.published_date, window);
    auto key = std::make_tuple(a.source.slug(), int(a.conflict), int(period), r.model_id);
    Cell& cell = cells[key];
    ++cell.counts[std::size_t(r.label)];
    ++cell.n;
    sources.emplace(a.source.slug(), a.source);
  }

  std::vector<PeriodSummary> summaries;
  for (const auto& [key, cell] : cells) {
    PeriodSummary s;
    s.source = sources.at(std::get<0>(key));
    s.conflict = Conflict(std::get<1>(key));
    s.period = Period(std::get<2>(key));
    s.model_id = std::get<3>(key);
    s.n_articles = cell.n;
    for (PoliticalLabel l : kAllLabels)
      s.proportions[l] = double(cell.counts[std::size_t(l)]) / double(cell.n);
    summaries.push_back(std::move(s));
  }
  return summaries;
}

enum class Bucket { Weekly, Monthly };

struct TimePoint {
  Date period_start;
  double mean_score = 0.0;
  std::size_t n = 0;
};

struct EventAnnotation {
  Date date;
  std::string caption;
};

/// Mean-score series over time buckets; empty buckets are omitted rather
/// than zero-filled (a zero would read as perfectly centrist coverage).
struct BiasTimeSeries {
  Bucket bucket = Bucket::Weekly;
  std::vector<TimePoint> points;          // strictly increasing period_start
  std::vector<EventAnnotation> events;
};

/// Buckets encoded scores by ISO week (dated by its Monday) or by month.
inline BiasTimeSeries time_series(const std::vector<ClassificationRecord>& records,
                                  const Corpus& corpus, Bucket bucket,
                                  std::vector<EventAnnotation> events = {}) {
  std::map<std::string, const Article*> by_url;
  for (const Article& a : corpus.articles) by_url[a.url] = &a;

  struct Acc {
    long sum = 0;
    std::size_t n = 0;
  };
  std::map<Date, Acc> buckets;
  for (const ClassificationRecord& r : records) {
    auto it = by_url.find(r.url);
    if (it == by_url.end())
      throw Error(ErrorCode::DanglingRecord, r.url + " not present in corpus");
    const Date d = it->second->published_date;
    const Date start = bucket == Bucket::Weekly ? d.week_monday() : d.month_start();
    Acc& acc = buckets[start];
    acc.sum += encode(r.label);
    ++acc.n;
  }

  BiasTimeSeries series;
  series.bucket = bucket;
  series.events = std::move(events);
  std::sort(series.events.begin(), series.events.end(),
            [](const EventAnnotation& a, const EventAnnotation& b) { return a.date < b.date; });
  for (const auto& [start, acc] : buckets)
    series.points.push_back({start, double(acc.sum) / double(acc.n), acc.n});
  return series;
}

// --- file formats -------------------------------------------------------

/// Events config: CSV `date,caption`.
inline std::vector<EventAnnotation> load_events(const std::string& path) {
  csv::Table table = csv::read_file(path);
  const int date_col = table.column("date");
  const int caption_col = table.column("caption");
  if (date_col < 0 || caption_col < 0)
    throw Error(ErrorCode::SchemaError, path + " needs date,caption columns");
  std::vector<EventAnnotation> events;
  for (const auto& row : table.rows) {
    events.push_back({Date::parse_or_throw(row[std::size_t(date_col)]),
                      row[std::size_t(caption_col)]});
  }
  return events;
}

/// Series CSV: `period_start,mean_score,n`.
inline void write_series_csv(const BiasTimeSeries& series, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const TimePoint& p : series.points)
    rows.push_back({p.period_start.to_string(), csv::format_double(p.mean_score),
                    std::to_string(p.n)});
  csv::write_file(path, {"period_start", "mean_score", "n"}, rows);
}

inline BiasTimeSeries read_series_csv(const std::string& path, Bucket bucket = Bucket::Weekly) {
  csv::Table table = csv::read_file(path);
  BiasTimeSeries series;
  series.bucket = bucket;
  for (const auto& row : table.rows) {
    if (row.size() < 3) throw Error(ErrorCode::MalformedRecord, "short row in " + path);
    series.points.push_back({Date::parse_or_throw(row[0]), csv::parse_double(row[1]),
                             std::size_t(std::stoul(row[2]))});
  }
  return series;
}

/// Summary CSV in the `metric,model,value` layout of the bias tables; rows
/// like "RU Pre-war Centre". `n` rides along for weighted recombination.
inline void write_summary_csv(const std::vector<PeriodSummary>& summaries,
                              const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<const PeriodSummary*> ordered;
  for (const PeriodSummary& s : summaries) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](const PeriodSummary* a, const PeriodSummary* b) {
    return std::tie(a->model_id, a->conflict, a->period) <
           std::tie(b->model_id, b->conflict, b->period);
  });
  for (const PeriodSummary* s : ordered) {
    for (PoliticalLabel l : kAllLabels) {
      std::string metric = std::string(conflict_abbrev(s->conflict)) + " " +
                           std::string(period_name(s->period)) + " " +
                           std::string(label_name(l));
      rows.push_back({metric, s->model_id, csv::format_double(s->proportion(l))});
    }
  }
  csv::write_file(path, {"metric", "model", "value"}, rows);
}

/// One line of the cross-cutting score table. "(all)" rows pool over the
/// corresponding dimension; pooled values never claim to reproduce any
/// per-outlet weighting beyond plain article-weighted means.
struct ScoreRow {
  std::string model;
  std::string conflict;
  std::string source;  // slug or "(all)"
  std::string period;  // "Pre-war", "During-war" or "(all)"
  double score = 0.0;  // mean encoded label, == P(Right) - P(Left)
  std::size_t n = 0;
};

/// Average bias scores per (model, conflict, source, period) plus pooled
/// rollups over source, over period, and over both.
inline std::vector<ScoreRow> bias_score_table(
    const std::vector<ClassificationRecord>& records, const Corpus& corpus,
    const std::map<Conflict, StudyWindow>& windows) {
  std::map<std::string, const Article*> by_url;
  for (const Article& a : corpus.articles) by_url[a.url] = &a;

  struct Acc {
    std::size_t left = 0, right = 0, n = 0;
  };
  std::map<std::tuple<std::string, std::string, std::string, std::string>, Acc> cells;
  for (const ClassificationRecord& r : records) {
    auto it = by_url.find(r.url);
    if (it == by_url.end())
      throw Error(ErrorCode::DanglingRecord, r.url + " not present in corpus");
    const Article& a = *it->second;
    auto wit = windows.find(a.conflict);
    const StudyWindow window = wit != windows.end() ? wit->second : StudyWindow{};
    const std::string conflict(conflict_name(a.conflict));
    const std::string source = a.source.slug();
    const std::string period(period_name(period_of(a.published_date, window)));
    for (const std::string& s : {source, std::string("(all)")}) {
      for (const std::string& p : {period, std::string("(all)")}) {
        Acc& acc = cells[{r.model_id, conflict, s, p}];
        if (r.label == PoliticalLabel::Left) ++acc.left;
        if (r.label == PoliticalLabel::Right) ++acc.right;
        ++acc.n;
      }
    }
  }
  std::vector<ScoreRow> rows;
  for (const auto& [key, acc] : cells) {
    const double n = double(acc.n);
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                    double(acc.right) / n - double(acc.left) / n, acc.n});
  }
  return rows;
}

inline void write_scores_csv(const std::vector<ScoreRow>& rows, const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (const ScoreRow& row : rows)
    out.push_back({row.model, row.conflict, row.source, row.period,
                   csv::format_double(row.score), std::to_string(row.n)});
  csv::write_file(path, {"model", "conflict", "source", "period", "score", "n"}, out);
}

struct SummaryCsvRow {
  std::string metric;
  std::string model;
  double value = 0.0;
};

inline std::vector<SummaryCsvRow> read_summary_csv(const std::string& path) {
  csv::Table table = csv::read_file(path);
  std::vector<SummaryCsvRow> rows;
  for (const auto& row : table.rows) {
    if (row.size() < 3) throw Error(ErrorCode::MalformedRecord, "short row in " + path);
    rows.push_back({row[0], row[1], csv::parse_double(row[2])});
  }
  return rows;
}

}  // namespace biaslens
