#pragma once

#include <string>
#include <string_view>

#include "biaslens/corpus.hpp"
#include "biaslens/error.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

/// Versioned prompt text. The wording deliberately avoids defining the three
/// labels so the model applies its own notion of political leaning; the
/// version participates in the classification cache key.
inline std::string_view prompt_template(std::string_view version) {
  if (version == "v1") {
    return "Read the news article below and classify its political leaning.\n"
           "Respond with exactly one word: Left, Right, or Centre.\n"
           "\n"
           "Title: {title}\n"
           "\n"
           "Article:\n"
           "{content}\n"
           "\n"
           "Label:";
  }
  throw Error(ErrorCode::ConfigError, "unknown prompt version: " + std::string(version));
}

inline constexpr std::size_t kPromptTokenCap = 10000;

/// Renders the versioned template for one article; byte-identical for
/// identical inputs. Articles over the token cap are refused.
inline std::string build_prompt(const Article& article, std::string_view version = "v1") {
  if (tokenize(article.content).size() > kPromptTokenCap)
    throw Error(ErrorCode::TooLong, article.url + " exceeds prompt token cap");
  std::string prompt(prompt_template(version));
  auto replace_once = [&](std::string_view placeholder, const std::string& value) {
    const std::size_t pos = prompt.find(placeholder);
    if (pos != std::string::npos) prompt.replace(pos, placeholder.size(), value);
  };
  replace_once("{title}", article.title);
  replace_once("{content}", article.content);
  return prompt;
}

}  // namespace biaslens
