#include "dsqa/service.hpp"

#include <filesystem>
#include <iostream>
#include <regex>

#include "httplib.h"
#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

HttpResult error_result(int status, const std::string& stage, const std::string& message, const std::string& detail = {}) {
  return {status, error_envelope_json(stage, message, detail)};
}

bool valid_name(const std::string& s) {
  static const std::regex kName("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(s, kName);
}

}  // namespace

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Queued: return "queued";
    case RunStatus::Running: return "running";
    case RunStatus::Done: return "done";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

RunStatus run_status_from_string(std::string_view name) {
  if (name == "queued") return RunStatus::Queued;
  if (name == "running") return RunStatus::Running;
  if (name == "done") return RunStatus::Done;
  if (name == "failed") return RunStatus::Failed;
  throw Error(ErrorCode::Parse, "unknown run status '" + std::string(name) + "'");
}

std::string run_record_to_json(const RunRecord& r) {
  return json{{"run_id", r.run_id},         {"status", std::string(to_string(r.status))},
              {"label", r.label},           {"n_items", r.n_items},
              {"done", r.done},             {"use_gold", r.use_gold},
              {"error", r.error},           {"created_at", r.created_at},
              {"finished_at", r.finished_at}}
      .dump();
}

RunRecord run_record_from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.status = run_status_from_string(j.at("status").get<std::string>());
    r.label = j.value("label", "");
    r.n_items = j.value("n_items", std::size_t{0});
    r.done = j.value("done", std::size_t{0});
    r.use_gold = j.value("use_gold", false);
    r.error = j.value("error", "");
    r.created_at = j.value("created_at", "");
    r.finished_at = j.value("finished_at", "");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad run record: ") + e.what());
  }
}

// ------------------------------------------------------------ run manager

BenchRunManager::BenchRunManager(const Pipeline& pipeline, std::string runs_dir, std::size_t max_queued)
    : pipeline_(pipeline), runs_dir_(std::move(runs_dir)), max_queued_(max_queued) {
  fs::create_directories(runs_dir_);
  std::vector<RunRecord> found;
  for (const auto& entry : fs::directory_iterator(runs_dir_)) {
    auto status_file = entry.path() / "status.json";
    if (!entry.is_directory() || !fs::exists(status_file)) continue;
    try {
      found.push_back(run_record_from_json(read_file(status_file.string())));
    } catch (const Error& e) {
      std::cerr << "warning: skipping run " << entry.path().filename().string() << ": " << e.what() << "\n";
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.run_id < b.run_id; });
  for (auto& r : found) {
    if (r.status == RunStatus::Running) {
      r.status = RunStatus::Failed;
      r.error = "interrupted by a restart";
      r.finished_at = utc_now_iso8601();
      save(r);
    }
    if (r.status == RunStatus::Queued) queue_.push_back(r.run_id);
    auto num = r.run_id.substr(r.run_id.find('-') + 1);
    if (!num.empty() && std::all_of(num.begin(), num.end(), ::isdigit))
      next_id_ = std::max(next_id_, static_cast<std::size_t>(std::stoull(num)) + 1);
    runs_[r.run_id] = r;
  }
  thread_ = std::thread([this] { worker(); });
}

BenchRunManager::~BenchRunManager() { stop(); }

void BenchRunManager::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

std::string BenchRunManager::run_dir(const std::string& run_id) const { return (fs::path(runs_dir_) / run_id).string(); }

void BenchRunManager::save(const RunRecord& r) const {
  fs::create_directories(run_dir(r.run_id));
  write_file_atomic((fs::path(run_dir(r.run_id)) / "status.json").string(), run_record_to_json(r) + "\n");
}

RunRecord BenchRunManager::submit(const std::vector<BenchmarkItem>& items, std::string label, bool use_gold) {
  std::unique_lock lock(mutex_);
  if (queue_.size() >= max_queued_)
    throw Error(ErrorCode::Busy, "run queue is full (" + std::to_string(max_queued_) + " queued)");
  char id[32];
  std::snprintf(id, sizeof id, "run-%06zu", next_id_++);
  RunRecord r;
  r.run_id = id;
  r.label = label.empty() ? "dsqa" : std::move(label);
  r.n_items = items.size();
  r.use_gold = use_gold;
  r.created_at = utc_now_iso8601();
  fs::create_directories(run_dir(r.run_id));
  write_file_atomic((fs::path(run_dir(r.run_id)) / "items.jsonl").string(), export_items(items));
  save(r);
  runs_[r.run_id] = r;
  queue_.push_back(r.run_id);
  lock.unlock();
  cv_.notify_all();
  return r;
}

std::optional<RunRecord> BenchRunManager::status(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> BenchRunManager::report_json(const std::string& run_id) const {
  auto st = status(run_id);
  if (!st || st->status != RunStatus::Done) return std::nullopt;
  return read_file((fs::path(run_dir(run_id)) / "report.json").string());
}

void BenchRunManager::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_cv_.wait(lock, [&] { return (queue_.empty() && !busy_) || stopping_; });
}

void BenchRunManager::worker() {
  for (;;) {
    RunRecord record;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) break;
      record = runs_.at(queue_.front());
      queue_.pop_front();
      busy_ = true;
      record.status = RunStatus::Running;
      runs_[record.run_id] = record;
    }
    save(record);
    try {
      execute(record);
      record.status = stopping_ ? RunStatus::Failed : RunStatus::Done;
      if (stopping_) record.error = "stopped before completion";
    } catch (const std::exception& e) {
      record.status = RunStatus::Failed;
      record.error = e.what();
    }
    record.finished_at = utc_now_iso8601();
    save(record);
    {
      std::lock_guard lock(mutex_);
      runs_[record.run_id] = record;
      busy_ = false;
    }
    idle_cv_.notify_all();
  }
  idle_cv_.notify_all();
}

void BenchRunManager::execute(RunRecord& record) {
  auto dir = fs::path(run_dir(record.run_id));
  auto items = import_items(read_file((dir / "items.jsonl").string()));
  std::vector<BenchPrediction> predictions;
  if (record.use_gold) {
    predictions = gold_predictions(items);
  } else {
    predictions = predict_items(
        pipeline_, items,
        [&](std::size_t done, std::size_t) {
          std::lock_guard lock(mutex_);
          runs_[record.run_id].done = done;
        },
        &stopping_);
  }
  record.done = predictions.size();
  write_file_atomic((dir / "predictions.jsonl").string(), export_predictions(predictions));
  auto results = score_predictions(items, predictions);
  std::string lines;
  for (const auto& r : results) lines += result_to_json(r) + "\n";
  write_file_atomic((dir / "results.jsonl").string(), lines);
  auto report = aggregate(results, record.label);
  write_file_atomic((dir / "report.txt").string(), report_text(report));
  write_file_atomic((dir / "report.json").string(), report_to_json(report));
}

// ------------------------------------------------------------ service

struct Service::Impl {
  httplib::Server server;
  std::thread thread;
};

int status_for(const StageError& error) {
  if (error.code() == ErrorCode::Timeout) return 504;
  if (error.stage() == "input") return 400;
  return 422;
}

Service::Service(Runtime& runtime)
    : runtime_(runtime),
      runs_(runtime.pipeline(), runtime.config().runs_dir, runtime.config().max_queued_runs),
      impl_(std::make_unique<Impl>()) {}

Service::~Service() {
  stop();
  runs_.stop();
}

HttpResult Service::query(const std::string& body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error_result(400, "input", "request body is not valid JSON");
  }
  if (!req.is_object() || !req.contains("question") || !req["question"].is_string())
    return error_result(400, "input", "expected {\"question\": string}");
  QaOptions options;
  try {
    options.visualize = req.value("visualize", true);
    options.render_image = req.value("render_image", false);
    if (req.contains("answer_type")) options.expected = answer_type_from_string(req["answer_type"].get<std::string>());
  } catch (const std::exception& e) {
    return error_result(400, "input", std::string("bad option: ") + e.what());
  }
  try {
    auto r = runtime_.pipeline().answer_question(req["question"].get<std::string>(), options);
    return {200, qa_response_to_json(r)};
  } catch (const StageError& e) {
    return error_result(status_for(e), e.stage(), e.what(), e.sql().empty() ? e.detail() : e.sql());
  }
}

HttpResult Service::bench_run(const std::string& body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error_result(400, "input", "request body is not valid JSON");
  }
  if (!req.is_object()) return error_result(400, "input", "expected a JSON object");
  std::vector<BenchmarkItem> items;
  try {
    if (req.contains("benchmark")) {
      auto name = req["benchmark"].get<std::string>();
      if (!valid_name(name)) return error_result(400, "input", "benchmark names use letters, digits, '-' and '_'");
      auto path = fs::path(runtime_.config().data_dir) / "bench" / (name + ".jsonl");
      if (!fs::exists(path)) return error_result(404, "input", "no benchmark named " + name);
      items = import_items(read_file(path.string()));
    } else if (req.contains("items") && req["items"].is_array()) {
      for (const auto& item : req["items"]) items.push_back(item_from_json(item.dump()));
    } else {
      return error_result(400, "input", "expected \"benchmark\" or \"items\"");
    }
  } catch (const Error& e) {
    return error_result(400, "input", e.what());
  } catch (const json::exception& e) {
    return error_result(400, "input", e.what());
  }
  try {
    auto label = req.contains("label") && req["label"].is_string() ? req["label"].get<std::string>() : std::string();
    bool use_gold = req.contains("use_gold") && req["use_gold"].is_boolean() && req["use_gold"].get<bool>();
    auto r = runs_.submit(items, label, use_gold);
    return {202, run_record_to_json(r)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Busy) return error_result(409, "bench", e.what());
    throw;
  }
}

HttpResult Service::bench_report(const std::string& run_id) {
  auto st = runs_.status(run_id);
  if (!st) return error_result(404, "bench", "no run " + run_id);
  json out = json::parse(run_record_to_json(*st));
  if (st->status == RunStatus::Done) {
    out["report"] = json::parse(*runs_.report_json(run_id));
    return {200, out.dump()};
  }
  out["report"] = nullptr;
  return {st->status == RunStatus::Failed ? 200 : 202, out.dump()};
}

HttpResult Service::schema() const { return {200, catalog_to_json(runtime_.store().catalog())}; }

HttpResult Service::health() {
  json tables = json::object();
  for (auto name : kPersistentTables) {
    auto f = runtime_.store().query("SELECT COUNT(*) FROM " + std::string(name));
    tables[std::string(name)] = std::get<std::int64_t>(f.rows.at(0).at(0));
  }
  json j{{"status", "ok"},
         {"snapshot_id", runtime_.store().content_id()},
         {"tables", tables},
         {"open_sessions", runtime_.store().open_session_count()},
         {"storage_bytes", runtime_.store().storage_size()}};
  return {200, j.dump()};
}

namespace {

void install_routes(httplib::Server& server, Service& service) {
  auto reply = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/api/query", [&, reply](const httplib::Request& req, httplib::Response& res) { reply(res, service.query(req.body)); });
  server.Post("/api/bench/run",
              [&, reply](const httplib::Request& req, httplib::Response& res) { reply(res, service.bench_run(req.body)); });
  server.Get(R"(/api/bench/report/([A-Za-z0-9_-]+))", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.bench_report(req.matches[1]));
  });
  server.Get("/api/schema", [&, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.schema()); });
  server.Get("/api/health", [&, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_envelope_json("server", msg, ""), "application/json");
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(error_envelope_json("server", "not found", ""), "application/json");
  });
}

}  // namespace

bool Service::listen(const std::string& host, int port) {
  install_routes(impl_->server, *this);
  return impl_->server.listen(host, port);
}

int Service::listen_background(const std::string& host) {
  install_routes(impl_->server, *this);
  int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw Error(ErrorCode::Config, "cannot bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace dsqa
