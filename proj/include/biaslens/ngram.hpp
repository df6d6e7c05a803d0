#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/error.hpp"
#include "biaslens/stopwords_en.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

/// Case-insensitive stopword lookup over a standard list plus a custom set of
/// corpus-specific neutral words.
class StopwordConfig {
 public:
  static StopwordConfig defaults() {
    StopwordConfig cfg;
    for (std::string_view w : kStandardStopwordsEn) cfg.standard_.emplace(w);
    for (std::string_view w : kDefaultCustomStopwords) cfg.custom_.emplace(w);
    return cfg;
  }

  static StopwordConfig empty() { return StopwordConfig{}; }

  void add_standard(std::string_view w) { standard_.insert(lower(w)); }
  void add_custom(std::string_view w) { custom_.insert(lower(w)); }

  /// Replaces the standard list with the newline-separated words in `path`.
  void load_standard_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read stopword file " + path);
    standard_.clear();
    std::string word;
    while (std::getline(in, word)) {
      while (!word.empty() && (word.back() == '\r' || word.back() == ' ')) word.pop_back();
      if (!word.empty()) standard_.insert(lower(word));
    }
  }

  bool is_stopword(std::string_view token) const {
    const std::string low = lower(token);
    return standard_.count(low) > 0 || custom_.count(low) > 0;
  }

  std::size_t standard_size() const { return standard_.size(); }
  std::size_t custom_size() const { return custom_.size(); }

 private:
  static std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) out.push_back(ch >= 'A' && ch <= 'Z' ? char(ch - 'A' + 'a') : ch);
    return out;
  }

  std::unordered_set<std::string> standard_;
  std::unordered_set<std::string> custom_;
};

/// Removes stopwords, preserving order.
inline TokenSequence filter_tokens(const TokenSequence& tokens, const StopwordConfig& stop) {
  TokenSequence out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (!stop.is_stopword(t)) out.push_back(t);
  }
  return out;
}

/// Yields the max(0, n_tokens - n + 1) space-joined n-grams in order.
inline std::vector<std::string> extract_ngrams(const TokenSequence& tokens, std::size_t n) {
  std::vector<std::string> grams;
  if (n == 0 || tokens.size() < n) return grams;
  grams.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string g = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      g.push_back(' ');
      g += tokens[i + j];
    }
    grams.push_back(std::move(g));
  }
  return grams;
}

struct NgramRow {
  std::string ngram;
  std::size_t count = 0;
  double per_10k = 0.0;  // count / total n-gram occurrences * 10000

  bool operator==(const NgramRow& o) const {
    return ngram == o.ngram && count == o.count && per_10k == o.per_10k;
  }
};

/// Top-k n-grams by count (ties lexicographic), normalized against the
/// corpus-wide post-filter n-gram total. N-grams never cross documents.
inline std::vector<NgramRow> top_k(const Corpus& corpus, std::size_t n, std::size_t k,
                                   const StopwordConfig& stop) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "n-gram table over empty corpus");
  if (n < 1 || k < 1) throw Error(ErrorCode::EmptyInput, "top_k requires n >= 1 and k >= 1");
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const Article& a : corpus.articles) {
    const TokenSequence filtered = filter_tokens(tokenize(a.content), stop);
    for (std::string& g : extract_ngrams(filtered, n)) {
      ++counts[std::move(g)];
      ++total;
    }
  }
  std::vector<NgramRow> rows;
  rows.reserve(counts.size());
  for (auto& [gram, count] : counts) {
    rows.push_back({gram, count, double(count) / double(total) * 10000.0});
  }
  std::sort(rows.begin(), rows.end(), [](const NgramRow& a, const NgramRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.ngram < b.ngram;
  });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

}  // namespace biaslens
