#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace biaslens {
namespace html {

namespace detail {

inline char lower(char c) { return c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c; }

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (lower(a[i]) != lower(b[i])) return false;
  return true;
}

inline std::size_t ifind(std::string_view haystack, std::string_view needle,
                         std::size_t from = 0) {
  if (needle.empty() || haystack.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    if (iequals(haystack.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

// Finds the body of the first <tag ...>...</tag>; no nesting of the same tag.
inline std::optional<std::string_view> element_body(std::string_view html,
                                                    std::string_view tag,
                                                    std::size_t from = 0) {
  const std::string open = "<" + std::string(tag);
  for (std::size_t pos = from;;) {
    pos = ifind(html, open, pos);
    if (pos == std::string_view::npos) return std::nullopt;
    const std::size_t after = pos + open.size();
    // must be followed by '>' or whitespace (avoid matching <p in <path>)
    if (after < html.size() && html[after] != '>' && !std::isspace(static_cast<unsigned char>(html[after]))) {
      pos = after;
      continue;
    }
    const std::size_t tag_end = html.find('>', pos);
    if (tag_end == std::string_view::npos) return std::nullopt;
    const std::string close = "</" + std::string(tag);
    const std::size_t close_pos = ifind(html, close, tag_end + 1);
    if (close_pos == std::string_view::npos) return std::nullopt;
    return html.substr(tag_end + 1, close_pos - tag_end - 1);
  }
}

inline void append_entity_decoded(std::string& out, std::string_view entity) {
  if (entity == "amp") out.push_back('&');
  else if (entity == "lt") out.push_back('<');
  else if (entity == "gt") out.push_back('>');
  else if (entity == "quot") out.push_back('"');
  else if (entity == "apos" || entity == "#39") out.push_back('\'');
  else if (entity == "nbsp") out.push_back(' ');
  else if (!entity.empty() && entity[0] == '#') {
    long cp = 0;
    bool hex = entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X');
    for (std::size_t i = hex ? 2 : 1; i < entity.size(); ++i) {
      char c = lower(entity[i]);
      int digit = c >= '0' && c <= '9' ? c - '0' : c >= 'a' && c <= 'f' ? c - 'a' + 10 : -1;
      if (digit < 0 || (!hex && digit > 9)) return;
      cp = cp * (hex ? 16 : 10) + digit;
      if (cp > 0x10FFFF) return;
    }
    if (cp >= 0x20) {
      // minimal UTF-8 encode
      if (cp < 0x80) out.push_back(char(cp));
      else if (cp < 0x800) {
        out.push_back(char(0xC0 | (cp >> 6)));
        out.push_back(char(0x80 | (cp & 0x3F)));
      } else if (cp < 0x10000) {
        out.push_back(char(0xE0 | (cp >> 12)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
      } else {
        out.push_back(char(0xF0 | (cp >> 18)));
        out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
      }
    }
  }
  // unknown entities are dropped
}

// Removes <script>/<style>/<noscript> bodies and comments.
inline std::string strip_invisible(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  for (std::size_t i = 0; i < html.size();) {
    if (html.compare(i, 4, "<!--") == 0) {
      std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    bool skipped = false;
    for (std::string_view tag : {"script", "style", "noscript"}) {
      std::string open = "<" + std::string(tag);
      if (i + open.size() <= html.size() && iequals(html.substr(i, open.size()), open)) {
        std::string close = "</" + std::string(tag);
        std::size_t end = ifind(html, close, i);
        if (end == std::string_view::npos) {
          i = html.size();
        } else {
          std::size_t gt = html.find('>', end);
          i = gt == std::string_view::npos ? html.size() : gt + 1;
        }
        skipped = true;
        break;
      }
    }
    if (skipped) continue;
    out.push_back(html[i]);
    ++i;
  }
  return out;
}

}  // namespace detail

/// Tag-stripped text with entities decoded; block tags become spaces.
inline std::string visible_text(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  bool in_tag = false;
  for (std::size_t i = 0; i < html.size(); ++i) {
    const char c = html[i];
    if (in_tag) {
      if (c == '>') {
        in_tag = false;
        out.push_back(' ');
      }
      continue;
    }
    if (c == '<') {
      in_tag = true;
      continue;
    }
    if (c == '&') {
      std::size_t semi = html.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 10) {
        detail::append_entity_decoded(out, html.substr(i + 1, semi - i - 1));
        i = semi;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

/// Body text of a news page: the paragraph nodes of the main <article>
/// element, joined with spaces; whole-page visible text when no article
/// element exists. Downstream cleaning collapses the whitespace.
inline std::string extract_article_text(std::string_view page) {
  const std::string stripped = detail::strip_invisible(page);
  auto article = detail::element_body(stripped, "article");
  if (article) {
    std::string out;
    std::string_view body = *article;
    std::size_t from = 0;
    for (;;) {
      auto p = detail::element_body(body, "p", from);
      if (!p) break;
      if (!out.empty()) out.push_back(' ');
      out += visible_text(*p);
      from = static_cast<std::size_t>(p->data() + p->size() - body.data());
    }
    if (!out.empty()) return out;
    return visible_text(*article);
  }
  auto body = detail::element_body(stripped, "body");
  return visible_text(body ? *body : std::string_view(stripped));
}

inline std::string extract_title(std::string_view page) {
  auto title = detail::element_body(page, "title");
  return title ? visible_text(*title) : std::string();
}

/// Publication date from <meta property="article:published_time"> or a
/// <time datetime="..."> attribute; empty when neither is present.
inline std::string extract_published_date(std::string_view page) {
  auto read_attr = [&](std::size_t tag_pos, std::string_view attr) -> std::string {
    std::size_t end = page.find('>', tag_pos);
    if (end == std::string_view::npos) return {};
    std::string_view tag = page.substr(tag_pos, end - tag_pos);
    std::size_t a = detail::ifind(tag, attr);
    if (a == std::string_view::npos) return {};
    std::size_t q1 = tag.find_first_of("\"'", a + attr.size());
    if (q1 == std::string_view::npos) return {};
    std::size_t q2 = tag.find(tag[q1], q1 + 1);
    if (q2 == std::string_view::npos) return {};
    return std::string(tag.substr(q1 + 1, q2 - q1 - 1));
  };
  std::size_t pos = 0;
  while ((pos = detail::ifind(page, "<meta", pos)) != std::string_view::npos) {
    std::size_t end = page.find('>', pos);
    if (end == std::string_view::npos) break;
    std::string_view tag = page.substr(pos, end - pos);
    if (detail::ifind(tag, "article:published_time") != std::string_view::npos) {
      std::string content = read_attr(pos, "content");
      if (content.size() >= 10) return content.substr(0, 10);
    }
    pos = end;
  }
  pos = detail::ifind(page, "<time");
  if (pos != std::string_view::npos) {
    std::string dt = read_attr(pos, "datetime");
    if (dt.size() >= 10) return dt.substr(0, 10);
  }
  return {};
}

}  // namespace html
}  // namespace biaslens
