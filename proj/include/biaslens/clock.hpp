#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace biaslens {

/// Time source used by rate limiting and retry backoff. Injectable so tests
/// can drive waits with a manual clock instead of real sleeps.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
  }
  void sleep_ms(std::int64_t ms) override {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
};

/// Test clock: sleep advances virtual time and every sleep is recorded.
class ManualClock : public Clock {
 public:
  std::int64_t now_ms() override {
    std::lock_guard lock(mutex_);
    return now_;
  }
  void sleep_ms(std::int64_t ms) override {
    std::lock_guard lock(mutex_);
    if (ms > 0) now_ += ms;
    sleeps_.push_back(ms);
  }
  void advance(std::int64_t ms) {
    std::lock_guard lock(mutex_);
    now_ += ms;
  }
  std::vector<std::int64_t> sleeps() const {
    std::lock_guard lock(mutex_);
    return sleeps_;
  }

 private:
  mutable std::mutex mutex_;
  std::int64_t now_ = 0;
  std::vector<std::int64_t> sleeps_;
};

inline std::shared_ptr<Clock> system_clock() {
  static auto clock = std::make_shared<SystemClock>();
  return clock;
}

}  // namespace biaslens
