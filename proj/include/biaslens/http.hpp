#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "biaslens/clock.hpp"
#include "biaslens/error.hpp"
#include "biaslens/ratelimit.hpp"

namespace biaslens {

struct HttpResponse {
  int status = 0;  // <= 0 means transport failure, no HTTP status
  std::string body;

  bool ok() const { return status >= 200 && status < 300; }
};

/// GET-only transport seam. Production uses httplib; tests can replay
/// recorded exchanges without touching the network.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

inline std::string url_encode(std::string_view value) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : value) {
    const bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                      c == '.' || c == '~';
    if (keep) {
      out.push_back(char(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

/// Appends query parameters to a base URL, percent-encoding values.
inline std::string build_url(const std::string& base,
                             const std::vector<std::pair<std::string, std::string>>& params) {
  std::string url = base;
  char sep = url.find('?') == std::string::npos ? '?' : '&';
  for (const auto& [key, value] : params) {
    url.push_back(sep);
    url += url_encode(key);
    url.push_back('=');
    url += url_encode(value);
    sep = '&';
  }
  return url;
}

/// Splits an absolute URL into the scheme://host[:port] origin and the
/// path?query remainder httplib expects.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::ConfigError, "not an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(int timeout_seconds = 30) : timeout_(timeout_seconds) {}

  HttpResponse get(const std::string& url) override {
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_, 0);
    client.set_read_timeout(timeout_, 0);
    client.set_follow_location(true);
    auto result = client.Get(path);
    if (!result) return {0, httplib::to_string(result.error())};
    return {result->status, result->body};
  }

 private:
  int timeout_;
};

/// Cassette passthrough: forwards to the inner transport and appends every
/// exchange to a JSONL file for later replay.
class RecordingTransport : public HttpTransport {
 public:
  RecordingTransport(std::shared_ptr<HttpTransport> inner, const std::string& path)
      : inner_(std::move(inner)), out_(path, std::ios::app | std::ios::binary) {
    if (!out_) throw Error(ErrorCode::IoError, "cannot write cassette " + path);
  }

  HttpResponse get(const std::string& url) override {
    HttpResponse response = inner_->get(url);
    std::lock_guard lock(mutex_);
    out_ << nlohmann::json{{"url", url},
                           {"status", response.status},
                           {"body", response.body}}
                .dump()
         << '\n';
    out_.flush();
    return response;
  }

 private:
  std::shared_ptr<HttpTransport> inner_;
  std::mutex mutex_;
  std::ofstream out_;
};

/// Replays a recorded cassette. Repeated requests to one URL consume the
/// recorded responses in order (the last one repeats).
class ReplayTransport : public HttpTransport {
 public:
  explicit ReplayTransport(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read cassette " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      exchanges_[j.at("url").get<std::string>()].push_back(
          {j.at("status").get<int>(), j.at("body").get<std::string>()});
    }
  }

  HttpResponse get(const std::string& url) override {
    std::lock_guard lock(mutex_);
    auto it = exchanges_.find(url);
    if (it == exchanges_.end() || it->second.empty())
      return {0, "no recorded exchange for " + url};
    auto& responses = it->second;
    std::size_t& cursor = cursors_[url];
    HttpResponse response = responses[std::min(cursor, responses.size() - 1)];
    ++cursor;
    return response;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::vector<HttpResponse>> exchanges_;
  std::map<std::string, std::size_t> cursors_;
};

/// GET with rate limiting and exponential backoff. 401/403 fail immediately
/// (AuthError); 429 and 5xx/transport failures retry up to
/// policy.max_retries; other non-2xx statuses are TransportError.
inline HttpResponse http_get_with_retry(HttpTransport& transport, const std::string& url,
                                        RateLimiter& limiter, RetryLog* log = nullptr) {
  const RatePolicy& policy = limiter.policy();
  for (int attempt = 0;; ++attempt) {
    HttpResponse response;
    {
      RateLimiter::Ticket ticket(limiter);
      response = transport.get(url);
    }
    if (log) log->statuses.push_back(response.status);
    if (response.ok()) return response;
    if (response.status == 401 || response.status == 403)
      throw Error(ErrorCode::AuthError, "HTTP " + std::to_string(response.status) + " for " + url);
    if (!is_retryable_status(response.status))
      throw Error(ErrorCode::TransportError,
                  "HTTP " + std::to_string(response.status) + " for " + url);
    if (attempt >= policy.max_retries) {
      if (response.status == 429)
        throw Error(ErrorCode::RateLimited, "retries exhausted for " + url);
      throw Error(ErrorCode::TransportError,
                  "retries exhausted for " + url + " (last status " +
                      std::to_string(response.status) + ")");
    }
    if (log) ++log->retries;
    limiter.clock().sleep_ms(backoff_delay_ms(policy, attempt));
  }
}

}  // namespace biaslens
