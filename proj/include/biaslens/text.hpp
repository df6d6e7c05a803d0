#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace biaslens {

struct DecodedChar {
  char32_t cp;
  std::size_t len;
  bool valid;
};

/// Decodes one UTF-8 sequence at `pos`. Structurally invalid input yields
/// U+FFFD with length 1 so the scan always makes progress.
inline DecodedChar utf8_decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1, true};
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() &&
           (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t i) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F);
  };
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1);
    return DecodedChar{cp, 2, cp >= 0x80};
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2);
    return DecodedChar{cp, 3, cp >= 0x800};
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) |
                  (bits(2) << 6) | bits(3);
    return DecodedChar{cp, 4, cp >= 0x10000 && cp <= 0x10FFFF};
  }
  return {0xFFFD, 1, false};
}

inline void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

inline bool is_ascii_punct(char32_t cp) {
  return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
         (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

/// Punctuation stripped from token edges: ASCII punctuation plus the common
/// typographic quotes, dashes and ellipsis seen in news copy.
inline bool is_edge_punct(char32_t cp) {
  if (is_ascii_punct(cp)) return true;
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:  // curly quotes
    case 0x2013: case 0x2014: case 0x2026:               // dashes, ellipsis
    case 0xAB: case 0xBB: case 0x2039: case 0x203A:      // guillemets
    case 0xA1: case 0xBF: case 0xB7:
      return true;
    default:
      return false;
  }
}

inline bool is_control(char32_t cp) {
  return cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F);
}

enum class RejectReason { None, Empty, NonEnglish, EncodingGarbage };

inline std::string_view reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "None";
    case RejectReason::Empty: return "Empty";
    case RejectReason::NonEnglish: return "NonEnglish";
    case RejectReason::EncodingGarbage: return "EncodingGarbage";
  }
  return "None";
}

struct Cleaned {
  std::string title;
  std::string content;
  RejectReason reject = RejectReason::None;
  bool ok() const { return reject == RejectReason::None; }
};

namespace detail {

struct ScrubStats {
  std::size_t total_cps = 0;
  std::size_t garbage = 0;       // invalid sequences and U+FFFD glyphs
  std::size_t ascii_letters = 0;
  std::size_t other_letters = 0;  // non-ASCII, non-space, non-punct codepoints
};

inline std::string scrub(std::string_view raw, ScrubStats& stats) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size();) {
    DecodedChar dc = utf8_decode(raw, i);
    i += dc.len;
    ++stats.total_cps;
    if (!dc.valid || dc.cp == 0xFFFD) {
      ++stats.garbage;
      continue;
    }
    if (is_unicode_space(dc.cp)) {
      pending_space = true;
      continue;
    }
    if (is_control(dc.cp)) continue;
    if (pending_space) {
      if (!out.empty()) out.push_back(' ');
      pending_space = false;
    }
    if (dc.cp >= 'A' && dc.cp <= 'Z') ++stats.ascii_letters;
    else if (dc.cp >= 'a' && dc.cp <= 'z') ++stats.ascii_letters;
    else if (dc.cp >= 0x80 && !is_edge_punct(dc.cp)) ++stats.other_letters;
    utf8_append(out, dc.cp);
  }
  return out;
}

}  // namespace detail

inline constexpr double kGarbageRatioLimit = 0.2;
inline constexpr double kAsciiLetterRatioMin = 0.6;

/// Scrubs control characters and encoding-error glyphs, collapses whitespace
/// runs and trims. Rejects empty content, heavily garbled input and text that
/// fails the ASCII-letter-ratio English gate.
inline Cleaned clean(std::string_view raw_title, std::string_view raw_content) {
  Cleaned result;
  detail::ScrubStats title_stats;
  detail::ScrubStats stats;
  result.title = detail::scrub(raw_title, title_stats);
  result.content = detail::scrub(raw_content, stats);
  if (stats.total_cps > 0 &&
      double(stats.garbage) / double(stats.total_cps) > kGarbageRatioLimit) {
    result.reject = RejectReason::EncodingGarbage;
    return result;
  }
  if (result.content.empty()) {
    result.reject = RejectReason::Empty;
    return result;
  }
  const double letters = double(stats.ascii_letters + stats.other_letters);
  if (letters > 0 && double(stats.ascii_letters) / letters < kAsciiLetterRatioMin) {
    result.reject = RejectReason::NonEnglish;
    return result;
  }
  return result;
}

using TokenSequence = std::vector<std::string>;

namespace detail {

// Strips edge punctuation from one whitespace-delimited word; empty result
// means the word was punctuation only.
inline std::string strip_edges(std::string_view word) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (pos, len)
  std::vector<char32_t> cps;
  for (std::size_t i = 0; i < word.size();) {
    DecodedChar dc = utf8_decode(word, i);
    spans.emplace_back(i, dc.len);
    cps.push_back(dc.cp);
    i += dc.len;
  }
  std::size_t first = 0, last = cps.size();
  while (first < last && is_edge_punct(cps[first])) ++first;
  while (last > first && is_edge_punct(cps[last - 1])) --last;
  if (first >= last) return {};
  const std::size_t begin = spans[first].first;
  const std::size_t end = spans[last - 1].first + spans[last - 1].second;
  return std::string(word.substr(begin, end - begin));
}

}  // namespace detail

/// Canonical tokenizer: lowercase, split on Unicode whitespace, strip edge
/// punctuation per token, drop empties. Deterministic and model-agnostic.
inline TokenSequence tokenize(std::string_view content) {
  TokenSequence tokens;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    std::string stripped = detail::strip_edges(word);
    if (!stripped.empty()) tokens.push_back(std::move(stripped));
    word.clear();
  };
  for (std::size_t i = 0; i < content.size();) {
    DecodedChar dc = utf8_decode(content, i);
    i += dc.len;
    if (is_unicode_space(dc.cp)) {
      flush();
      continue;
    }
    char32_t cp = dc.cp;
    if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
    utf8_append(word, cp);
  }
  flush();
  return tokens;
}

inline std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace biaslens
