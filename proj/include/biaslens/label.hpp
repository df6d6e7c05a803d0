#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biaslens/error.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

enum class PoliticalLabel { Left, Centre, Right };

inline constexpr std::array<PoliticalLabel, 3> kAllLabels = {
    PoliticalLabel::Left, PoliticalLabel::Centre, PoliticalLabel::Right};

inline std::string_view label_name(PoliticalLabel l) {
  switch (l) {
    case PoliticalLabel::Left: return "Left";
    case PoliticalLabel::Centre: return "Centre";
    case PoliticalLabel::Right: return "Right";
  }
  return "Centre";
}

/// Parses a backend response into a label. Trims whitespace and punctuation,
/// case-insensitive; "Center" and "Neutral" normalize to Centre. Anything
/// else is unparseable (nullopt) and the raw text stays with the caller.
inline std::optional<PoliticalLabel> parse_label(std::string_view raw) {
  std::size_t begin = 0, end = raw.size();
  auto trimmable = [](char c) {
    char32_t cp = static_cast<unsigned char>(c);
    return cp < 0x80 && (is_unicode_space(cp) || is_ascii_punct(cp));
  };
  while (begin < end && trimmable(raw[begin])) ++begin;
  while (end > begin && trimmable(raw[end - 1])) --end;
  std::string low;
  low.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    char c = raw[i];
    low.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
  }
  if (low == "left") return PoliticalLabel::Left;
  if (low == "right") return PoliticalLabel::Right;
  if (low == "centre" || low == "center" || low == "neutral") return PoliticalLabel::Centre;
  return std::nullopt;
}

/// Majority vote. A tie for the maximum resolves to the tie-break label
/// (Centre by default): defaulting to either wing would fabricate a
/// directional lean.
inline PoliticalLabel vote(std::span<const PoliticalLabel> labels,
                           PoliticalLabel tie_break = PoliticalLabel::Centre) {
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "vote over zero labels");
  std::array<std::size_t, 3> counts{0, 0, 0};
  for (PoliticalLabel l : labels) ++counts[static_cast<std::size_t>(l)];
  std::size_t best = 0;
  for (std::size_t c : counts) best = std::max(best, c);
  PoliticalLabel winner = tie_break;
  int winners = 0;
  for (PoliticalLabel l : kAllLabels) {
    if (counts[static_cast<std::size_t>(l)] == best) {
      winner = l;
      ++winners;
    }
  }
  return winners == 1 ? winner : tie_break;
}

inline PoliticalLabel vote(const std::vector<PoliticalLabel>& labels,
                           PoliticalLabel tie_break = PoliticalLabel::Centre) {
  return vote(std::span<const PoliticalLabel>(labels), tie_break);
}

}  // namespace biaslens
