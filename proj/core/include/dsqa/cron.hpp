#pragma once

#include <atomic>
#include <bitset>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

namespace dsqa {

using SysTime = std::chrono::system_clock::time_point;

/// Five-field cron expression (minute hour day-of-month month day-of-week),
/// evaluated in UTC. Supports `*`, lists, ranges and `/step`.
class CronExpr {
 public:
  /// Throws Error(Config) on malformed input.
  static CronExpr parse(std::string_view text);

  bool matches(SysTime t) const;
  /// First matching minute strictly after `t`.
  SysTime next_after(SysTime t) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::bitset<60> minute_;
  std::bitset<24> hour_;
  std::bitset<32> dom_;
  std::bitset<13> month_;
  std::bitset<8> dow_;
  bool dom_star_ = true;
  bool dow_star_ = true;
};

/// Fires a job at instants matching a cron expression. Ticks come either from
/// an internal wall-clock thread (start) or from a test harness (on_tick).
/// A tick that arrives while the previous run is still going is skipped.
class RefreshScheduler {
 public:
  using Job = std::function<void()>;

  RefreshScheduler(CronExpr expr, Job job);
  ~RefreshScheduler();
  RefreshScheduler(const RefreshScheduler&) = delete;
  RefreshScheduler& operator=(const RefreshScheduler&) = delete;

  /// Evaluates one clock reading. Each matching minute fires at most once.
  /// Returns true when a run was started.
  bool on_tick(SysTime now);

  void start();
  void cancel();
  bool cancelled() const { return cancelled_; }
  /// Blocks until no run is in flight.
  void wait_idle();

  int runs_started() const { return runs_; }
  int runs_skipped() const { return skipped_; }
  bool running() const { return running_; }

 private:
  CronExpr expr_;
  Job job_;
  std::atomic<bool> running_{false};
  std::atomic<bool> cancelled_{false};
  std::atomic<int> runs_{0};
  std::atomic<int> skipped_{0};
  std::int64_t last_minute_ = -1;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::thread worker_;
  std::thread ticker_;
};

}  // namespace dsqa
