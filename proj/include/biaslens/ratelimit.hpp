#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "biaslens/clock.hpp"
#include "biaslens/error.hpp"

namespace biaslens {

/// Request pacing and retry knobs shared by all remote calls to one host.
struct RatePolicy {
  int max_concurrent = 4;
  std::int64_t min_interval_ms = 0;
  int max_retries = 3;
  std::int64_t base_backoff_ms = 250;
  std::int64_t max_backoff_ms = 30000;  // backoff ceiling

  void validate() const {
    if (max_concurrent < 1 || min_interval_ms < 0 || max_retries < 0 ||
        base_backoff_ms < 1 || max_backoff_ms < base_backoff_ms)
      throw Error(ErrorCode::ConfigError, "invalid rate policy");
  }
};

struct RetryLog {
  int retries = 0;
  std::vector<int> statuses;  // status of every attempt, in order
};

/// HTTP-style status classes shared by transports and backends; <= 0 means
/// transport failure.
inline bool is_retryable_status(int status) {
  return status <= 0 || status == 429 || (status >= 500 && status < 600);
}

/// Delay before retry attempt k (0-based): base * 2^k, capped.
inline std::int64_t backoff_delay_ms(const RatePolicy& policy, int attempt) {
  std::int64_t delay = policy.base_backoff_ms;
  for (int i = 0; i < attempt; ++i) {
    if (delay > policy.max_backoff_ms / 2) return policy.max_backoff_ms;
    delay *= 2;
  }
  return std::min(delay, policy.max_backoff_ms);
}

/// Shared limiter for one remote host: at most max_concurrent requests in
/// flight and consecutive request starts >= min_interval_ms apart. The only
/// mutable state shared between workers; all members are guarded by mutex_.
class RateLimiter {
 public:
  RateLimiter(RatePolicy policy, std::shared_ptr<Clock> clock = system_clock())
      : policy_(policy), clock_(std::move(clock)) {
    policy_.validate();
  }

  /// Blocks until a slot is free and the interval has elapsed, then marks a
  /// request start. Pair with release().
  void acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
      cv_.wait(lock, [&] { return in_flight_ < policy_.max_concurrent; });
      const std::int64_t now = clock_->now_ms();
      const std::int64_t ready_at =
          has_started_ ? last_start_ms_ + policy_.min_interval_ms : now;
      if (now >= ready_at) {
        ++in_flight_;
        last_start_ms_ = now;
        has_started_ = true;
        start_times_.push_back(now);
        return;
      }
      const std::int64_t wait = ready_at - now;
      lock.unlock();
      clock_->sleep_ms(wait);
      lock.lock();
    }
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      --in_flight_;
    }
    cv_.notify_one();
  }

  /// Timestamps of every acquire, for spacing assertions in tests.
  std::vector<std::int64_t> start_times() const {
    std::lock_guard lock(mutex_);
    return start_times_;
  }

  const RatePolicy& policy() const { return policy_; }
  Clock& clock() { return *clock_; }

  class Ticket {
   public:
    explicit Ticket(RateLimiter& limiter) : limiter_(&limiter) { limiter_->acquire(); }
    ~Ticket() {
      if (limiter_) limiter_->release();
    }
    Ticket(const Ticket&) = delete;
    Ticket& operator=(const Ticket&) = delete;

   private:
    RateLimiter* limiter_;
  };

 private:
  RatePolicy policy_;
  std::shared_ptr<Clock> clock_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  bool has_started_ = false;
  std::int64_t last_start_ms_ = 0;
  std::vector<std::int64_t> start_times_;
};

}  // namespace biaslens
