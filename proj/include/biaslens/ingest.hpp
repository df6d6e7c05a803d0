#pragma once

#include <algorithm>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/csv.hpp"
#include "biaslens/error.hpp"
#include "biaslens/html.hpp"
#include "biaslens/http.hpp"
#include "biaslens/parallel.hpp"
#include "biaslens/ratelimit.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

/// Case-insensitive content filter for one conflict.
struct KeywordSet {
  Conflict conflict = Conflict::RussiaUkraine;
  std::vector<std::string> keywords;

  static KeywordSet defaults(Conflict c) {
    KeywordSet set;
    set.conflict = c;
    if (c == Conflict::RussiaUkraine)
      set.keywords = {"Russia", "Ukraine"};
    else
      set.keywords = {"Hamas", "Palestine", "Israel"};
    return set;
  }

  /// True if any keyword occurs in `body` as a case-insensitive substring.
  bool matches(std::string_view body) const {
    std::string low;
    low.reserve(body.size());
    for (char c : body) low.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
    for (const std::string& kw : keywords) {
      std::string k;
      for (char c : kw) k.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
      if (!k.empty() && low.find(k) != std::string::npos) return true;
    }
    return false;
  }
};

struct TagQuery {
  std::vector<std::string> tags;  // e.g. "world/russia"
  Date from;
  Date to;

  void validate() const {
    if (tags.empty()) throw Error(ErrorCode::ConfigError, "tag query needs at least one tag");
    if (to < from) throw Error(ErrorCode::ConfigError, "tag query date range reversed");
  }
};

/// One fetched article before cleaning.
struct RawRecord {
  std::string url;
  std::string title;
  std::string body;
  std::string date;  // as delivered; first 10 chars expected YYYY-MM-DD
  std::vector<std::string> tags;
};

inline nlohmann::json raw_record_to_json(const RawRecord& r) {
  return nlohmann::json{{"url", r.url}, {"title", r.title}, {"body", r.body},
                        {"date", r.date}, {"tags", r.tags}};
}

namespace detail {

inline std::string json_string_at(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (j.contains(key) && j.at(key).is_string()) return j.at(key).get<std::string>();
  }
  return {};
}

inline RawRecord parse_api_result(const nlohmann::json& j) {
  RawRecord r;
  r.url = json_string_at(j, {"webUrl", "url"});
  r.title = json_string_at(j, {"webTitle", "title"});
  r.date = json_string_at(j, {"webPublicationDate", "date"});
  r.body = json_string_at(j, {"body"});
  if (r.body.empty() && j.contains("fields") && j.at("fields").is_object())
    r.body = json_string_at(j.at("fields"), {"bodyText", "body"});
  if (j.contains("tags") && j.at("tags").is_array()) {
    for (const auto& tag : j.at("tags")) {
      if (tag.is_string()) r.tags.push_back(tag.get<std::string>());
      else if (tag.is_object() && tag.contains("id")) r.tags.push_back(tag.at("id").get<std::string>());
    }
  }
  if (r.url.empty() || r.date.empty() || r.body.empty())
    throw Error(ErrorCode::SchemaError, "API result missing url/date/body");
  return r;
}

inline std::string join_tags(const std::vector<std::string>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out.push_back('|');
    out += tags[i];
  }
  return out;
}

}  // namespace detail

/// Pulls every result page for a tag query from a Guardian-shaped content
/// API. Page 1 reports the page count; the remaining pages are fetched by a
/// bounded pool sharing the limiter, and records come back in page order.
inline std::vector<RawRecord> fetch_by_tags(HttpTransport& transport,
                                            const std::string& endpoint,
                                            const TagQuery& query, RateLimiter& limiter,
                                            const std::string& api_key,
                                            RetryLog* log = nullptr,
                                            int page_size = 50) {
  query.validate();
  if (api_key.empty()) throw Error(ErrorCode::AuthError, "missing API key");

  auto page_url = [&](int page) {
    return build_url(endpoint, {{"tag", detail::join_tags(query.tags)},
                                {"from-date", query.from.to_string()},
                                {"to-date", query.to.to_string()},
                                {"page", std::to_string(page)},
                                {"page-size", std::to_string(page_size)},
                                {"api-key", api_key}});
  };

  auto parse_page = [&](const HttpResponse& http) -> nlohmann::json {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(http.body);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::SchemaError, std::string("bad API JSON: ") + e.what());
    }
    if (!j.contains("response")) throw Error(ErrorCode::SchemaError, "missing response envelope");
    return j.at("response");
  };

  std::mutex log_mutex;
  auto fetch_page = [&](int page) {
    RetryLog local;
    HttpResponse http = http_get_with_retry(transport, page_url(page), limiter, &local);
    if (log) {
      std::lock_guard lock(log_mutex);
      log->retries += local.retries;
      log->statuses.insert(log->statuses.end(), local.statuses.begin(), local.statuses.end());
    }
    return parse_page(http);
  };

  nlohmann::json first = fetch_page(1);
  const int pages = first.value("pages", 1);
  std::vector<std::vector<RawRecord>> by_page(std::size_t(std::max(pages, 1)));
  auto collect = [&](const nlohmann::json& response, int page) {
    if (!response.contains("results") || !response.at("results").is_array())
      throw Error(ErrorCode::SchemaError, "missing results array");
    for (const auto& item : response.at("results"))
      by_page[std::size_t(page - 1)].push_back(detail::parse_api_result(item));
  };
  collect(first, 1);

  if (pages > 1) {
    std::mutex error_mutex;
    std::optional<Error> failure;
    parallel_for(std::size_t(pages - 1), limiter.policy().max_concurrent, [&](std::size_t i) {
      const int page = int(i) + 2;
      try {
        collect(fetch_page(page), page);
      } catch (const Error& e) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = e;
      }
    });
    if (failure) throw *failure;
  }

  std::vector<RawRecord> records;
  for (auto& page : by_page)
    for (auto& r : page) records.push_back(std::move(r));
  return records;
}

enum class ScrapeFailureKind { FetchFailed, ExtractFailed };

struct ScrapeFailure {
  std::string url;
  ScrapeFailureKind kind;
  std::string message;
};

struct ScrapeResult {
  std::vector<RawRecord> records;   // keyword-matched articles, input order
  std::vector<ScrapeFailure> failures;
  std::size_t filtered_out = 0;     // fetched fine but no keyword hit
};

/// Fetches each URL (with retry), extracts the article text and keeps the
/// record iff a keyword matches. Per-URL failures are collected, not fatal;
/// only a fully failed batch raises.
inline ScrapeResult scrape_urls(HttpTransport& transport,
                                const std::vector<std::string>& url_list,
                                const KeywordSet& keywords, RateLimiter& limiter) {
  if (url_list.empty()) throw Error(ErrorCode::EmptyInput, "no URLs to scrape");

  struct Slot {
    std::optional<RawRecord> record;
    std::optional<ScrapeFailure> failure;
    bool filtered = false;
  };
  std::vector<Slot> slots(url_list.size());

  parallel_for(url_list.size(), limiter.policy().max_concurrent, [&](std::size_t i) {
    const std::string& url = url_list[i];
    HttpResponse http;
    try {
      http = http_get_with_retry(transport, url, limiter);
    } catch (const Error& e) {
      slots[i].failure = ScrapeFailure{url, ScrapeFailureKind::FetchFailed, e.what()};
      return;
    }
    RawRecord r;
    r.url = url;
    r.title = html::extract_title(http.body);
    r.body = html::extract_article_text(http.body);
    r.date = html::extract_published_date(http.body);
    if (r.body.find_first_not_of(" \t\r\n") == std::string::npos) {
      slots[i].failure = ScrapeFailure{url, ScrapeFailureKind::ExtractFailed, "no article text"};
      return;
    }
    if (!keywords.matches(r.body)) {
      slots[i].filtered = true;
      return;
    }
    slots[i].record = std::move(r);
  });

  ScrapeResult result;
  for (Slot& slot : slots) {
    if (slot.record) result.records.push_back(std::move(*slot.record));
    else if (slot.failure) result.failures.push_back(std::move(*slot.failure));
    else if (slot.filtered) ++result.filtered_out;
  }
  if (result.records.empty() && result.filtered_out == 0 && !result.failures.empty())
    throw Error(ErrorCode::TransportError, "every URL failed");
  return result;
}

/// Rejection and drop counts from raw-record conversion.
struct ToArticlesReport {
  std::size_t accepted = 0;
  std::size_t rejected_empty = 0;
  std::size_t rejected_non_english = 0;
  std::size_t rejected_garbage = 0;
  std::size_t missing_date = 0;
  std::size_t out_of_window = 0;
  std::size_t duplicate_urls = 0;
};

/// Cleans raw records into Articles: drops rejects and out-of-window dates,
/// stamps source/conflict, dedups by url. Nothing here is fatal; everything
/// dropped is counted.
inline Corpus to_articles(const std::vector<RawRecord>& records, const Source& source,
                          Conflict conflict, const StudyWindow& window,
                          ToArticlesReport* report = nullptr) {
  ToArticlesReport local;
  Corpus corpus;
  for (const RawRecord& r : records) {
    Cleaned cleaned = clean(r.title, r.body);
    if (!cleaned.ok()) {
      switch (cleaned.reject) {
        case RejectReason::Empty: ++local.rejected_empty; break;
        case RejectReason::NonEnglish: ++local.rejected_non_english; break;
        case RejectReason::EncodingGarbage: ++local.rejected_garbage; break;
        case RejectReason::None: break;
      }
      continue;
    }
    auto date = r.date.size() >= 10 ? Date::parse(std::string_view(r.date).substr(0, 10))
                                    : std::nullopt;
    if (!date) {
      ++local.missing_date;
      continue;
    }
    if (!window.contains(*date)) {
      ++local.out_of_window;
      continue;
    }
    Article a;
    a.url = r.url;
    a.title = cleaned.title;
    a.content = cleaned.content;
    a.published_date = *date;
    a.source = source;
    a.conflict = conflict;
    corpus.articles.push_back(std::move(a));
  }
  const std::size_t before = corpus.articles.size();
  corpus = dedup(corpus);
  local.duplicate_urls = before - corpus.articles.size();
  local.accepted = corpus.articles.size();
  if (report) *report = local;
  return corpus;
}

/// URL-list input: plain text (one URL per line, '#' comments) or CSV with a
/// `url` column.
inline std::vector<std::string> load_url_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read url list " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    lines.push_back(line);
  }
  std::vector<std::string> urls;
  const bool is_csv = !lines.empty() && lines[0].find(',') != std::string::npos;
  if (is_csv) {
    auto header = csv::split_row(lines[0]);
    int col = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == "url") col = int(i);
    if (col < 0) throw Error(ErrorCode::SchemaError, "CSV url list missing `url` column");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto row = csv::split_row(lines[i]);
      if (int(row.size()) > col && !row[std::size_t(col)].empty())
        urls.push_back(row[std::size_t(col)]);
    }
  } else {
    for (const std::string& l : lines) {
      if (l.empty() || l[0] == '#') continue;
      urls.push_back(l);
    }
  }
  return urls;
}

}  // namespace biaslens
