#pragma once

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "biaslens/emotion.hpp"
#include "biaslens/error.hpp"
#include "biaslens/hash.hpp"
#include "biaslens/label.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

/// One request to a text-completion backend. Prompt runs always use
/// temperature 0.0; identical requests in a session are byte-identical.
struct BackendRequest {
  std::string text;
  double temperature = 0.0;
  int max_output_tokens = 16;
  std::vector<std::string> stop_tokens;
};

struct BackendResponse {
  int status = 200;  // HTTP-style; <=0 transport failure, 429/5xx retryable
  std::string raw_text;

  bool ok() const { return status >= 200 && status < 300; }
};

/// Stable fingerprint of a request; the scripted-fixture key.
inline std::string request_hash(const BackendRequest& request) {
  std::string canon = request.text;
  canon.push_back('\x1f');
  canon += std::to_string(request.temperature);
  canon.push_back('\x1f');
  canon += std::to_string(request.max_output_tokens);
  for (const std::string& stop : request.stop_tokens) {
    canon.push_back('\x1f');
    canon += stop;
  }
  return to_hex(fnv1a64(canon));
}

inline std::string chunk_text(std::span<const std::string> tokens) {
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) text.push_back(' ');
    text += tokens[i];
  }
  return text;
}

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual BackendResponse complete(const BackendRequest& request) = 0;
  virtual const std::string& id() const = 0;
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

class ChunkLabelBackend {
 public:
  virtual ~ChunkLabelBackend() = default;
  virtual PoliticalLabel classify_chunk(std::span<const std::string> tokens) = 0;
  virtual const std::string& id() const = 0;
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

class EmotionBackend {
 public:
  virtual ~EmotionBackend() = default;
  virtual EmotionDistribution score_chunk(std::span<const std::string> tokens) = 0;
  virtual const std::string& id() const = 0;
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

namespace detail {

inline PoliticalLabel label_from_hash(std::uint64_t h) {
  // skewed toward Centre, like real outlets
  const std::uint64_t r = mix64(h) % 100;
  if (r < 30) return PoliticalLabel::Left;
  if (r < 75) return PoliticalLabel::Centre;
  return PoliticalLabel::Right;
}

inline EmotionDistribution distribution_from_hash(std::uint64_t h) {
  EmotionDistribution d;
  double total = 0;
  std::uint64_t state = h;
  for (double& p : d.probs) {
    state = mix64(state);
    p = double(state % 1000) + 1.0;
    total += p;
  }
  for (double& p : d.probs) p /= total;
  return d;
}

}  // namespace detail

/// Offline stand-in for a remote model: the response is a pure function of
/// the request content, so repeated runs are bit-identical.
class SimCompletionBackend : public CompletionBackend {
 public:
  explicit SimCompletionBackend(std::string id, std::uint64_t seed = 0)
      : id_(std::move(id)), seed_(seed) {}

  BackendResponse complete(const BackendRequest& request) override {
    ++calls_;
    const std::uint64_t h = fnv1a64(request.text, 0xcbf29ce484222325ULL ^ seed_);
    return {200, std::string(label_name(detail::label_from_hash(h)))};
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::uint64_t seed_;
};

class SimChunkBackend : public ChunkLabelBackend {
 public:
  explicit SimChunkBackend(std::string id, std::uint64_t seed = 0)
      : id_(std::move(id)), seed_(seed) {}

  PoliticalLabel classify_chunk(std::span<const std::string> tokens) override {
    ++calls_;
    return detail::label_from_hash(fnv1a64(chunk_text(tokens), 0xcbf29ce484222325ULL ^ seed_));
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::uint64_t seed_;
};

class SimEmotionBackend : public EmotionBackend {
 public:
  explicit SimEmotionBackend(std::string id, std::uint64_t seed = 0)
      : id_(std::move(id)), seed_(seed) {}

  EmotionDistribution score_chunk(std::span<const std::string> tokens) override {
    ++calls_;
    return detail::distribution_from_hash(
        fnv1a64(chunk_text(tokens), 0xcbf29ce484222325ULL ^ seed_));
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::uint64_t seed_;
};

/// Mock backend driven by a JSON fixture mapping request-hash to scripted
/// responses (status + text, consumed in order; the last entry repeats).
/// Optional fields: "default" response and "deterministic_fallback" to fall
/// back to the content-hash sim for unscripted requests.
///
///   {"entries": {"<hash>": [{"status":429,"text":""},{"text":"Left"}]},
///    "default": {"text":"Centre"},
///    "deterministic_fallback": false}
class ScriptedCompletionBackend : public CompletionBackend {
 public:
  ScriptedCompletionBackend(std::string id, const std::string& fixture_path)
      : id_(std::move(id)) {
    std::ifstream in(fixture_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read fixture " + fixture_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("entries")) {
      for (auto& [key, responses] : j.at("entries").items()) {
        for (const auto& r : responses)
          entries_[key].push_back({r.value("status", 200), r.value("text", "")});
      }
    }
    if (j.contains("default")) {
      const auto& d = j.at("default");
      default_ = BackendResponse{d.value("status", 200), d.value("text", "")};
    }
    deterministic_fallback_ = j.value("deterministic_fallback", false);
  }

  BackendResponse complete(const BackendRequest& request) override {
    ++calls_;
    const std::string key = request_hash(request);
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      std::size_t& cursor = cursors_[key];
      const auto& responses = it->second;
      BackendResponse r = responses[std::min(cursor, responses.size() - 1)];
      ++cursor;
      return r;
    }
    if (deterministic_fallback_) {
      const std::uint64_t h = fnv1a64(request.text);
      return {200, std::string(label_name(detail::label_from_hash(h)))};
    }
    if (default_) return *default_;
    throw Error(ErrorCode::BackendError, "no scripted response for request " + key);
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::mutex mutex_;
  std::map<std::string, std::vector<BackendResponse>> entries_;
  std::map<std::string, std::size_t> cursors_;
  std::optional<BackendResponse> default_;
  bool deterministic_fallback_ = false;
};

/// HTTP text-completion adapter. The provider shape maps our request onto
/// the wire format; the key rides in from BIASLENS_LLM_API_KEY.
class HttpCompletionBackend : public CompletionBackend {
 public:
  enum class Provider { OpenAiLike, GeminiLike };

  HttpCompletionBackend(std::string id, std::string base_url, std::string model,
                        Provider provider = Provider::OpenAiLike,
                        std::string api_key = api_key_from_env())
      : id_(std::move(id)), base_url_(std::move(base_url)), model_(std::move(model)),
        provider_(provider), api_key_(std::move(api_key)) {}

  BackendResponse complete(const BackendRequest& request) override {
    ++calls_;
    nlohmann::json body;
    std::string path;
    if (provider_ == Provider::OpenAiLike) {
      path = "/v1/completions";
      body = {{"model", model_},
              {"prompt", request.text},
              {"temperature", request.temperature},
              {"max_tokens", request.max_output_tokens}};
      if (!request.stop_tokens.empty()) body["stop"] = request.stop_tokens;
    } else {
      path = "/v1beta/models/" + model_ + ":generateContent";
      body = {{"contents", {{{"parts", {{{"text", request.text}}}}}}},
              {"generationConfig",
               {{"temperature", request.temperature},
                {"maxOutputTokens", request.max_output_tokens}}}};
    }
    httplib::Client client(base_url_);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto result = client.Post(path, headers, body.dump(), "application/json");
    if (!result) return {0, httplib::to_string(result.error())};
    if (result->status < 200 || result->status >= 300) return {result->status, result->body};
    return {result->status, extract_text(result->body)};
  }
  const std::string& id() const override { return id_; }

  static std::string api_key_from_env() {
    const char* key = std::getenv("BIASLENS_LLM_API_KEY");
    return key ? key : "";
  }

 private:
  static std::string extract_text(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) return body;
    if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
      const auto& c = j["choices"][0];
      if (c.contains("text")) return c["text"].get<std::string>();
      if (c.contains("message") && c["message"].contains("content"))
        return c["message"]["content"].get<std::string>();
    }
    if (j.contains("candidates") && j["candidates"].is_array() && !j["candidates"].empty()) {
      const auto& parts = j["candidates"][0]["content"]["parts"];
      if (parts.is_array() && !parts.empty() && parts[0].contains("text"))
        return parts[0]["text"].get<std::string>();
    }
    if (j.contains("text")) return j["text"].get<std::string>();
    return body;
  }

  std::string id_;
  std::string base_url_;
  std::string model_;
  Provider provider_;
  std::string api_key_;
};

/// HTTP chunk classifier: POST {"model","text"} -> {"label": "Left"}.
class HttpChunkBackend : public ChunkLabelBackend {
 public:
  HttpChunkBackend(std::string id, std::string base_url, std::string model,
                   std::string path = "/classify")
      : id_(std::move(id)), base_url_(std::move(base_url)), model_(std::move(model)),
        path_(std::move(path)) {}

  PoliticalLabel classify_chunk(std::span<const std::string> tokens) override {
    ++calls_;
    nlohmann::json body = {{"model", model_}, {"text", chunk_text(tokens)}};
    httplib::Client client(base_url_);
    auto result = client.Post(path_, body.dump(), "application/json");
    if (!result || result->status < 200 || result->status >= 300)
      throw Error(ErrorCode::BackendError,
                  "chunk backend " + id_ + " failed (status " +
                      std::to_string(result ? result->status : 0) + ")");
    nlohmann::json j = nlohmann::json::parse(result->body);
    auto label = parse_label(j.at("label").get<std::string>());
    if (!label) throw Error(ErrorCode::BackendError, "chunk backend returned bad label");
    return *label;
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::string base_url_;
  std::string model_;
  std::string path_;
};

/// HTTP emotion scorer: POST {"model","text"} -> {"probs": {"anger":..,}}.
class HttpEmotionBackend : public EmotionBackend {
 public:
  HttpEmotionBackend(std::string id, std::string base_url, std::string model,
                     std::string path = "/emotion")
      : id_(std::move(id)), base_url_(std::move(base_url)), model_(std::move(model)),
        path_(std::move(path)) {}

  EmotionDistribution score_chunk(std::span<const std::string> tokens) override {
    ++calls_;
    nlohmann::json body = {{"model", model_}, {"text", chunk_text(tokens)}};
    httplib::Client client(base_url_);
    auto result = client.Post(path_, body.dump(), "application/json");
    if (!result || result->status < 200 || result->status >= 300)
      throw Error(ErrorCode::BackendError,
                  "emotion backend " + id_ + " failed (status " +
                      std::to_string(result ? result->status : 0) + ")");
    nlohmann::json j = nlohmann::json::parse(result->body);
    EmotionDistribution d;
    for (Emotion e : kAllEmotions)
      d[e] = j.at("probs").at(std::string(emotion_name(e))).get<double>();
    if (!d.valid(1e-3))
      throw Error(ErrorCode::BackendError, "emotion backend returned invalid distribution");
    return d;
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::string base_url_;
  std::string model_;
  std::string path_;
};

/// Scripted chunk classifier: fixture maps hash(chunk text) -> label, with
/// optional deterministic fallback.
class ScriptedChunkBackend : public ChunkLabelBackend {
 public:
  ScriptedChunkBackend(std::string id, const std::string& fixture_path)
      : id_(std::move(id)) {
    std::ifstream in(fixture_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read fixture " + fixture_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("entries")) {
      for (auto& [key, value] : j.at("entries").items()) {
        auto label = parse_label(value.get<std::string>());
        if (!label) throw Error(ErrorCode::ConfigError, "bad label in fixture for " + key);
        entries_[key] = *label;
      }
    }
    deterministic_fallback_ = j.value("deterministic_fallback", false);
  }

  PoliticalLabel classify_chunk(std::span<const std::string> tokens) override {
    ++calls_;
    const std::string text = chunk_text(tokens);
    const std::string key = to_hex(fnv1a64(text));
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    if (deterministic_fallback_) return detail::label_from_hash(fnv1a64(text));
    throw Error(ErrorCode::BackendError, "no scripted label for chunk " + key);
  }
  const std::string& id() const override { return id_; }

 private:
  std::string id_;
  std::map<std::string, PoliticalLabel> entries_;
  bool deterministic_fallback_ = false;
};

}  // namespace biaslens
