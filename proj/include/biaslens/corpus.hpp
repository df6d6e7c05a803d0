#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biaslens/date.hpp"
#include "biaslens/error.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

enum class Conflict { RussiaUkraine, IsraelHamas };

inline std::string_view conflict_name(Conflict c) {
  return c == Conflict::RussiaUkraine ? "russia-ukraine" : "israel-hamas";
}

/// Short form used in table row labels ("RU Pre-war Centre", ...).
inline std::string_view conflict_abbrev(Conflict c) {
  return c == Conflict::RussiaUkraine ? "RU" : "IP";
}

inline std::optional<Conflict> parse_conflict(std::string_view s) {
  std::string low;
  for (char ch : s) low.push_back(ch >= 'A' && ch <= 'Z' ? char(ch - 'A' + 'a') : ch);
  if (low == "russia-ukraine" || low == "russiaukraine" || low == "russia_ukraine" || low == "ru")
    return Conflict::RussiaUkraine;
  if (low == "israel-hamas" || low == "israelhamas" || low == "israel_hamas" || low == "ip" || low == "ih")
    return Conflict::IsraelHamas;
  return std::nullopt;
}

/// News source. BBC and Guardian are the studied outlets; anything else keeps
/// its name verbatim.
class Source {
 public:
  Source() : name_("BBC") {}
  static Source bbc() { return Source("BBC"); }
  static Source guardian() { return Source("Guardian"); }
  static Source other(std::string name) { return Source(std::move(name)); }

  static Source parse(std::string_view s) {
    std::string low;
    for (char ch : s) low.push_back(ch >= 'A' && ch <= 'Z' ? char(ch - 'A' + 'a') : ch);
    if (low == "bbc") return bbc();
    if (low == "guardian" || low == "the guardian") return guardian();
    return other(std::string(s));
  }

  const std::string& name() const { return name_; }
  bool operator==(const Source& o) const { return name_ == o.name_; }

  /// Lowercase token safe for file names.
  std::string slug() const {
    std::string out;
    for (char ch : name_) {
      if (ch >= 'A' && ch <= 'Z') out.push_back(char(ch - 'A' + 'a'));
      else if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) out.push_back(ch);
      else out.push_back('-');
    }
    return out;
  }

 private:
  explicit Source(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

struct Article {
  std::string url;
  std::string title;
  std::string content;
  Date published_date;
  Source source;
  Conflict conflict = Conflict::RussiaUkraine;

  bool operator==(const Article& o) const {
    return url == o.url && title == o.title && content == o.content &&
           published_date == o.published_date && source == o.source &&
           conflict == o.conflict;
  }
};

/// Study window with the pre-war / during-war boundary.
struct StudyWindow {
  Date start_date{2020, 1, 1};
  Date end_date{2024, 12, 31};
  Date war_start_date{2022, 2, 24};

  bool valid() const {
    return start_date <= war_start_date && war_start_date <= end_date;
  }
  bool contains(const Date& d) const { return d >= start_date && d <= end_date; }
};

inline Date default_war_start(Conflict c) {
  return c == Conflict::RussiaUkraine ? Date(2022, 2, 24) : Date(2023, 10, 7);
}

struct Corpus {
  std::vector<Article> articles;
  std::string provenance;

  std::size_t size() const { return articles.size(); }
  bool empty() const { return articles.empty(); }
};

/// Keeps the first occurrence of each url, order otherwise preserved.
inline Corpus dedup(const Corpus& corpus) {
  Corpus out;
  out.provenance = corpus.provenance;
  out.articles.reserve(corpus.articles.size());
  std::unordered_set<std::string_view> seen;
  for (const Article& a : corpus.articles) {
    if (seen.insert(a.url).second) out.articles.push_back(a);
  }
  return out;
}

/// Retains articles whose canonical token count is <= max_tokens (inclusive).
inline Corpus filter_by_token_count(const Corpus& corpus, std::size_t max_tokens = 10000) {
  Corpus out;
  out.provenance = corpus.provenance;
  for (const Article& a : corpus.articles) {
    if (tokenize(a.content).size() <= max_tokens) out.articles.push_back(a);
  }
  return out;
}

/// Splits by the war start date; the boundary day belongs to during-war.
inline std::pair<Corpus, Corpus> partition_by_period(const Corpus& corpus,
                                                     const StudyWindow& window) {
  Corpus pre, during;
  pre.provenance = corpus.provenance;
  during.provenance = corpus.provenance;
  for (const Article& a : corpus.articles) {
    if (!window.contains(a.published_date))
      throw Error(ErrorCode::OutOfWindow,
                  a.url + " dated " + a.published_date.to_string());
    if (a.published_date >= window.war_start_date)
      during.articles.push_back(a);
    else
      pre.articles.push_back(a);
  }
  return {std::move(pre), std::move(during)};
}

enum class Period { PreWar, DuringWar };

inline std::string_view period_name(Period p) {
  return p == Period::PreWar ? "Pre-war" : "During-war";
}

inline Period period_of(const Date& d, const StudyWindow& window) {
  return d >= window.war_start_date ? Period::DuringWar : Period::PreWar;
}

// --- JSONL persistence -------------------------------------------------

inline nlohmann::json article_to_json(const Article& a) {
  return nlohmann::json{{"url", a.url},
                        {"title", a.title},
                        {"content", a.content},
                        {"published_date", a.published_date.to_string()},
                        {"source", a.source.name()},
                        {"conflict", std::string(conflict_name(a.conflict))}};
}

inline Article article_from_json(const nlohmann::json& j) {
  Article a;
  a.url = j.at("url").get<std::string>();
  a.title = j.at("title").get<std::string>();
  a.content = j.at("content").get<std::string>();
  a.published_date = Date::parse_or_throw(j.at("published_date").get<std::string>());
  a.source = Source::parse(j.at("source").get<std::string>());
  auto conflict = parse_conflict(j.at("conflict").get<std::string>());
  if (!conflict) throw Error(ErrorCode::MalformedRecord,
                             "unknown conflict: " + j.at("conflict").get<std::string>());
  a.conflict = *conflict;
  return a;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const Article& a : corpus.articles) {
    out << article_to_json(a).dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

struct LoadStats {
  std::size_t malformed_lines = 0;  // lenient mode only
};

/// Loads a JSONL corpus. Lenient mode skips malformed lines and counts them;
/// strict mode throws MalformedRecord with the 1-based line number.
inline Corpus load_corpus(const std::string& path, bool strict = false,
                          LoadStats* stats = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  Corpus corpus;
  corpus.provenance = path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      corpus.articles.push_back(article_from_json(j));
    } catch (const std::exception& e) {
      if (strict)
        throw Error(ErrorCode::MalformedRecord,
                    path + ":" + std::to_string(line_no) + ": " + e.what());
      if (stats) ++stats->malformed_lines;
    }
  }
  return corpus;
}

}  // namespace biaslens
