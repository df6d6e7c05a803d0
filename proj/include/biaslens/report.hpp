#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaslens/biasindex.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/csv.hpp"
#include "biaslens/error.hpp"
#include "biaslens/hash.hpp"
#include "biaslens/ngram.hpp"
#include "biaslens/sentiment.hpp"
#include "biaslens/svg.hpp"

namespace biaslens {

/// Everything the report stage renders for one (conflict, source) dataset.
struct DatasetAggregates {
  Source source;
  Conflict conflict = Conflict::RussiaUkraine;
  std::vector<PeriodSummary> summaries;                      // all models
  std::map<std::string, BiasTimeSeries> weekly_index;        // model -> series
  std::map<std::string, BiasTimeSeries> monthly_diff;        // model -> series
  std::map<std::string, std::vector<EmotionGroupRow>> emotion;  // model -> rows
  std::map<std::size_t, std::vector<NgramRow>> ngrams;       // n -> rows
};

inline std::string table_filename(Conflict conflict, const Source& source,
                                  const std::string& model, const std::string& kind,
                                  const std::string& ext = "csv") {
  return std::string(conflict_name(conflict)) + "_" + source.slug() + "_" + model + "_" +
         kind + "." + ext;
}

inline void write_ngram_csv(const std::vector<NgramRow>& rows, const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back({std::to_string(i + 1), rows[i].ngram, std::to_string(rows[i].count),
                   csv::format_double(rows[i].per_10k)});
  }
  csv::write_file(path, {"rank", "ngram", "count", "per_10k"}, out);
}

inline std::vector<NgramRow> read_ngram_csv(const std::string& path) {
  csv::Table table = csv::read_file(path);
  std::vector<NgramRow> rows;
  for (const auto& row : table.rows) {
    if (row.size() < 4) throw Error(ErrorCode::MalformedRecord, "short row in " + path);
    rows.push_back({row[1], std::size_t(std::stoul(row[2])), csv::parse_double(row[3])});
  }
  return rows;
}

/// Emotion table: exactly the columns `group,anger,...,neutral`.
inline void write_emotion_csv(const std::vector<EmotionGroupRow>& rows,
                              const std::string& path) {
  std::vector<std::string> header = {"group"};
  for (Emotion e : kAllEmotions) header.emplace_back(emotion_name(e));
  std::vector<std::vector<std::string>> out;
  for (const EmotionGroupRow& row : rows) {
    std::vector<std::string> fields = {row.group};
    for (Emotion e : kAllEmotions) fields.push_back(csv::format_double(row.mean[e]));
    out.push_back(std::move(fields));
  }
  csv::write_file(path, header, out);
}

inline std::vector<EmotionGroupRow> read_emotion_csv(const std::string& path) {
  csv::Table table = csv::read_file(path);
  std::vector<EmotionGroupRow> rows;
  for (const auto& row : table.rows) {
    if (row.size() < 8) throw Error(ErrorCode::MalformedRecord, "short row in " + path);
    EmotionGroupRow r;
    r.group = row[0];
    for (std::size_t i = 0; i < 7; ++i)
      r.mean.probs[i] = csv::parse_double(row[i + 1]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline std::string ngram_kind(std::size_t n) {
  if (n == 2) return "bigram";
  if (n == 3) return "trigram";
  return std::to_string(n) + "gram";
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace detail

/// Writes every CSV table for one dataset under deterministic names;
/// byte-identical output for identical inputs. Kinds with no data are
/// skipped and reported through `warnings`.
inline std::vector<std::string> emit_tables(const DatasetAggregates& agg,
                                            const std::string& out_dir,
                                            std::vector<std::string>* warnings = nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> files;
  auto warn = [&](const std::string& message) {
    if (warnings) warnings->push_back(message);
  };
  auto emit = [&](const std::string& name, auto&& write_fn, bool has_data) {
    if (!has_data) {
      warn("no data for " + name);
      return;
    }
    const std::string path = (fs::path(out_dir) / name).string();
    write_fn(path);
    files.push_back(name);
  };

  std::set<std::string> models;
  for (const PeriodSummary& s : agg.summaries) models.insert(s.model_id);

  for (const std::string& model : models) {
    std::vector<PeriodSummary> own;
    for (const PeriodSummary& s : agg.summaries)
      if (s.model_id == model) own.push_back(s);
    emit(table_filename(agg.conflict, agg.source, model, "summary"),
         [&](const std::string& p) { write_summary_csv(own, p); }, !own.empty());

    auto weekly = agg.weekly_index.find(model);
    emit(table_filename(agg.conflict, agg.source, model, "weekly-index"),
         [&](const std::string& p) { write_series_csv(weekly->second, p); },
         weekly != agg.weekly_index.end() && !weekly->second.points.empty());

    auto monthly = agg.monthly_diff.find(model);
    emit(table_filename(agg.conflict, agg.source, model, "monthly-diff"),
         [&](const std::string& p) { write_series_csv(monthly->second, p); },
         monthly != agg.monthly_diff.end() && !monthly->second.points.empty());

    auto emotion = agg.emotion.find(model);
    emit(table_filename(agg.conflict, agg.source, model, "emotion"),
         [&](const std::string& p) { write_emotion_csv(emotion->second, p); },
         emotion != agg.emotion.end() && !emotion->second.empty());
  }
  if (models.empty()) warn("empty summary set for " + std::string(conflict_name(agg.conflict)) +
                           "_" + agg.source.slug());

  for (const auto& [n, rows] : agg.ngrams) {
    emit(table_filename(agg.conflict, agg.source, "ngram", detail::ngram_kind(n)),
         [&](const std::string& p) { write_ngram_csv(rows, p); }, !rows.empty());
  }
  return files;
}

/// Renders the chart set for one dataset: grouped proportion bars, one
/// emotion chart per model, and event-annotated weekly-index and
/// monthly-diff lines with the fixed [-1, 1] bias range.
inline std::vector<std::string> emit_charts(const DatasetAggregates& agg,
                                            const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& content) {
    detail::write_text_file((fs::path(out_dir) / name).string(), content);
    files.push_back(name);
  };
  const std::string prefix =
      std::string(conflict_name(agg.conflict)) + "_" + agg.source.slug();
  const std::string label =
      std::string(conflict_abbrev(agg.conflict)) + " / " + agg.source.name();

  // proportions: groups = period x label, one bar per model
  {
    std::set<std::string> model_set;
    for (const PeriodSummary& s : agg.summaries) model_set.insert(s.model_id);
    std::vector<std::string> model_names(model_set.begin(), model_set.end());
    std::vector<svg::BarGroup> groups;
    for (Period period : {Period::PreWar, Period::DuringWar}) {
      for (PoliticalLabel l : kAllLabels) {
        svg::BarGroup group;
        group.label = std::string(period_name(period)) + " " + std::string(label_name(l));
        for (const std::string& model : model_names) {
          double value = 0.0;
          for (const PeriodSummary& s : agg.summaries)
            if (s.model_id == model && s.period == period) value = s.proportion(l);
          group.values.push_back(value);
        }
        groups.push_back(std::move(group));
      }
    }
    if (agg.summaries.empty()) groups.clear();
    emit(prefix + "_proportions.svg",
         svg::grouped_bar_chart("Label proportions - " + label, model_names, groups));
  }

  // emotion distribution per model: groups = aggregate rows
  for (const auto& [model, rows] : agg.emotion) {
    std::vector<std::string> names;
    for (Emotion e : kAllEmotions) names.emplace_back(emotion_name(e));
    std::vector<svg::BarGroup> groups;
    for (const EmotionGroupRow& row : rows) {
      svg::BarGroup group;
      group.label = row.group;
      for (Emotion e : kAllEmotions) group.values.push_back(row.mean[e]);
      groups.push_back(std::move(group));
    }
    emit(prefix + "_" + model + "_emotion.svg",
         svg::grouped_bar_chart("Emotion distribution - " + label + " - " + model, names,
                                groups));
  }

  auto series_chart = [&](const std::map<std::string, BiasTimeSeries>& by_model,
                          const std::string& kind, const std::string& chart_title) {
    std::vector<svg::LineSeries> lines;
    std::vector<svg::EventMarker> markers;
    for (const auto& [model, series] : by_model) {
      svg::LineSeries line;
      line.name = model;
      for (const TimePoint& p : series.points)
        line.points.push_back({p.period_start, p.mean_score, p.n});
      lines.push_back(std::move(line));
      for (const EventAnnotation& e : series.events) {
        bool seen = false;
        for (const auto& m : markers) seen = seen || (m.date == e.date && m.caption == e.caption);
        if (!seen) markers.push_back({e.date, e.caption});
      }
    }
    emit(prefix + "_" + kind + ".svg",
         svg::line_chart(chart_title + " - " + label, lines, markers, -1.0, 1.0));
  };
  series_chart(agg.weekly_index, "weekly-index", "Weekly bias index");
  series_chart(agg.monthly_diff, "monthly-diff", "Monthly Right-Left difference");

  return files;
}

/// Reproducibility ledger for one pipeline run.
struct RunManifest {
  std::string run_id;
  nlohmann::json config_snapshot;
  nlohmann::json corpus_fingerprints = nlohmann::json::object();
  nlohmann::json models = nlohmann::json::array();
  std::vector<std::string> output_files;
  std::vector<std::string> warnings;
  double duration_seconds = 0.0;
  bool include_timing = true;  // off for byte-reproducible runs
};

inline nlohmann::json corpus_fingerprint(const Corpus& corpus) {
  nlohmann::json j;
  j["articles"] = corpus.articles.size();
  if (!corpus.articles.empty()) {
    Date lo = corpus.articles.front().published_date;
    Date hi = lo;
    for (const Article& a : corpus.articles) {
      lo = std::min(lo, a.published_date);
      hi = std::max(hi, a.published_date);
    }
    j["date_min"] = lo.to_string();
    j["date_max"] = hi.to_string();
  }
  return j;
}

/// Writes run.json after checking that every listed output exists and is
/// non-empty.
inline void write_manifest(const RunManifest& manifest, const std::string& out_dir) {
  namespace fs = std::filesystem;
  for (const std::string& name : manifest.output_files) {
    const fs::path path = fs::path(out_dir) / name;
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec || size == 0)
      throw Error(ErrorCode::IoError, "manifest lists missing or empty file " + name);
  }
  nlohmann::json j;
  j["run_id"] = manifest.run_id;
  j["config"] = manifest.config_snapshot;
  j["corpus_fingerprints"] = manifest.corpus_fingerprints;
  j["models"] = manifest.models;
  j["output_files"] = manifest.output_files;
  j["warnings"] = manifest.warnings;
  if (manifest.include_timing) j["duration_seconds"] = manifest.duration_seconds;
  detail::write_text_file((fs::path(out_dir) / "run.json").string(), j.dump(2) + "\n");
}

}  // namespace biaslens
