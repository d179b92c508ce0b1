#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dsqa/bench.hpp"
#include "dsqa/benchgen.hpp"
#include "dsqa/pipeline.hpp"
#include "dsqa/runtime.hpp"

namespace dsqa {

enum class RunStatus { Queued, Running, Done, Failed };

std::string_view to_string(RunStatus status);
RunStatus run_status_from_string(std::string_view name);

struct RunRecord {
  std::string run_id;
  RunStatus status = RunStatus::Queued;
  std::string label;
  std::size_t n_items = 0;
  std::size_t done = 0;
  bool use_gold = false;
  std::string error;
  std::string created_at;
  std::string finished_at;
};

std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(std::string_view text);

/// Benchmark runs executed one at a time on a worker thread. Every run lives
/// in `<runs_dir>/<run_id>/` (status.json, items.jsonl, predictions.jsonl,
/// results.jsonl, report.json, report.txt) and survives restarts: queued runs
/// are picked up again, runs interrupted mid-way are marked failed.
class BenchRunManager {
 public:
  BenchRunManager(const Pipeline& pipeline, std::string runs_dir, std::size_t max_queued);
  ~BenchRunManager();
  BenchRunManager(const BenchRunManager&) = delete;
  BenchRunManager& operator=(const BenchRunManager&) = delete;

  /// Persists the items and queues the run. Throws Error(Busy) when the
  /// queue is full.
  RunRecord submit(const std::vector<BenchmarkItem>& items, std::string label, bool use_gold);
  std::optional<RunRecord> status(const std::string& run_id) const;
  /// report.json contents of a finished run.
  std::optional<std::string> report_json(const std::string& run_id) const;
  /// Blocks until nothing is queued or running.
  void wait_idle();
  void stop();

 private:
  void worker();
  void execute(RunRecord& record);
  void save(const RunRecord& record) const;
  std::string run_dir(const std::string& run_id) const;

  const Pipeline& pipeline_;
  std::string runs_dir_;
  std::size_t max_queued_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  std::map<std::string, RunRecord> runs_;
  std::size_t next_id_ = 1;
  bool busy_ = false;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
};

struct HttpResult {
  int status = 200;
  std::string body;
};

/// HTTP front end. Handlers are plain functions of the request body so they
/// can be exercised without a socket; `listen` binds them to routes.
class Service {
 public:
  Service(Runtime& runtime);
  ~Service();

  HttpResult query(const std::string& body);
  HttpResult bench_run(const std::string& body);
  HttpResult bench_report(const std::string& run_id);
  HttpResult schema() const;
  HttpResult health();

  /// Blocks serving requests until stop(). Returns false when binding fails.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and serves on a background thread; returns the
  /// port.
  int listen_background(const std::string& host);
  void stop();

  BenchRunManager& runs() { return runs_; }

 private:
  struct Impl;
  Runtime& runtime_;
  BenchRunManager runs_;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for a pipeline failure.
int status_for(const StageError& error);

}  // namespace dsqa
