#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "biaslens/error.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

/// Sliding-window parameters for token-limited backends.
struct ChunkingConfig {
  std::size_t window = 512;
  std::size_t stride = 256;

  bool valid() const { return stride > 0 && stride <= window; }
  void validate() const {
    if (!valid())
      throw Error(ErrorCode::ConfigError, "chunking requires 0 < stride <= window");
  }
};

/// Half-open token range [offset, offset + length).
struct ChunkSpan {
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t end() const { return offset + length; }
  bool operator==(const ChunkSpan& o) const {
    return offset == o.offset && length == o.length;
  }
};

/// Overlapping windows at offsets 0, s, 2s, ...; each window is
/// min(w, n - offset) tokens; generation stops at the first window whose end
/// reaches n. Empty input yields zero windows.
inline std::vector<ChunkSpan> chunk(std::size_t n_tokens, const ChunkingConfig& cfg) {
  cfg.validate();
  std::vector<ChunkSpan> spans;
  if (n_tokens == 0) return spans;
  for (std::size_t offset = 0;; offset += cfg.stride) {
    const std::size_t end = std::min(offset + cfg.window, n_tokens);
    spans.push_back({offset, end - offset});
    if (end == n_tokens) break;
  }
  return spans;
}

inline std::vector<ChunkSpan> chunk(const TokenSequence& tokens, const ChunkingConfig& cfg) {
  return chunk(tokens.size(), cfg);
}

inline std::span<const std::string> chunk_view(const TokenSequence& tokens,
                                               const ChunkSpan& span) {
  return std::span<const std::string>(tokens.data() + span.offset, span.length);
}

}  // namespace biaslens
