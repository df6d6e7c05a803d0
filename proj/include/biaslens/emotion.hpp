#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "biaslens/error.hpp"

namespace biaslens {

/// Ekman's six basic emotions plus a neutral class.
enum class Emotion { Anger, Disgust, Fear, Joy, Sadness, Surprise, Neutral };

inline constexpr std::array<Emotion, 7> kAllEmotions = {
    Emotion::Anger, Emotion::Disgust, Emotion::Fear,     Emotion::Joy,
    Emotion::Sadness, Emotion::Surprise, Emotion::Neutral};

inline std::string_view emotion_name(Emotion e) {
  switch (e) {
    case Emotion::Anger: return "anger";
    case Emotion::Disgust: return "disgust";
    case Emotion::Fear: return "fear";
    case Emotion::Joy: return "joy";
    case Emotion::Sadness: return "sadness";
    case Emotion::Surprise: return "surprise";
    case Emotion::Neutral: return "neutral";
  }
  return "neutral";
}

inline Emotion parse_emotion(std::string_view s) {
  for (Emotion e : kAllEmotions)
    if (s == emotion_name(e)) return e;
  throw Error(ErrorCode::MalformedRecord, "unknown emotion: " + std::string(s));
}

/// Probability vector over the seven classes; a point on the simplex.
struct EmotionDistribution {
  std::array<double, 7> probs{0, 0, 0, 0, 0, 0, 0};

  double& operator[](Emotion e) { return probs[std::size_t(e)]; }
  double operator[](Emotion e) const { return probs[std::size_t(e)]; }

  static EmotionDistribution uniform() {
    EmotionDistribution d;
    d.probs.fill(1.0 / 7.0);
    return d;
  }

  double sum() const {
    double s = 0;
    for (double p : probs) s += p;
    return s;
  }

  bool valid(double tolerance = 1e-6) const {
    for (double p : probs)
      if (!(p >= 0.0 && p <= 1.0 + tolerance)) return false;
    return std::abs(sum() - 1.0) <= tolerance;
  }

  /// Argmax class; an exact tie for the maximum resolves to Neutral,
  /// mirroring the political vote's tie rule.
  Emotion dominant() const {
    double best = probs[0];
    for (double p : probs) best = std::max(best, p);
    Emotion winner = Emotion::Neutral;
    int winners = 0;
    for (Emotion e : kAllEmotions) {
      if (probs[std::size_t(e)] == best) {
        winner = e;
        ++winners;
      }
    }
    return winners == 1 ? winner : Emotion::Neutral;
  }

  bool operator==(const EmotionDistribution& o) const { return probs == o.probs; }
};

}  // namespace biaslens
