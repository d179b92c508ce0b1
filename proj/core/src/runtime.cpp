#include "dsqa/runtime.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

#include "dsqa/error.hpp"

namespace dsqa {

std::string RecordingProvider::complete(const CompletionRequest& req, bool& truncated) {
  auto started = std::chrono::steady_clock::now();
  auto text = inner_->complete(req, truncated);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  auto result = recorder_->record(req, text, inner_->name(), ms);
  if (!result.warning.empty()) std::cerr << "warning: " << result.warning << "\n";
  return text;
}

std::unique_ptr<Gateway> make_gateway(const AppConfig& config) {
  std::shared_ptr<Recorder> recorder;
  if (config.record_completions) recorder = std::make_shared<Recorder>(config.llm.mock_dir);
  auto build = [&](const ProviderConfig& p) -> std::shared_ptr<Provider> {
    auto provider = make_provider(p);
    if (recorder && p.kind != "mock") return std::make_shared<RecordingProvider>(provider, recorder);
    return provider;
  };
  auto gateway = std::make_unique<Gateway>(build(config.llm));
  for (const auto& [tag, p] : config.llm_per_tag) gateway->set_provider(tag, build(p));
  return gateway;
}

Runtime::Runtime(AppConfig config, bool load_data) : config_(std::move(config)) {
  validate_config(config_);
  if (!config_.audit_log.empty()) {
    audit_out_.open(config_.audit_log, std::ios::app);
    if (!audit_out_) throw Error(ErrorCode::Config, "cannot open audit log " + config_.audit_log);
  }
  store_ = std::make_unique<Store>(config_.db_path, config_.storage_budget);
  store_->apply_schema(default_catalog());
  if (config_.ingest_mode == IngestMode::Replay) {
    source_ = std::make_unique<ReplaySource>(config_.fpl_fixtures_dir);
  } else {
    source_ = std::make_unique<LiveSource>(config_.api_base_url);
  }
  auto field_map = FieldMap::load((std::filesystem::path(config_.data_dir) / "field_map.json").string());
  ingestor_ = std::make_unique<Ingestor>(*store_, *source_, std::move(field_map));
  gateway_ = make_gateway(config_);
  pipeline_ = std::make_unique<Pipeline>(*store_, *gateway_, PipelineAssets::load(config_.data_dir), detail_fetch(),
                                         config_.query_timeout, [this](const std::string& line) { audit(line); });
  if (!load_data) return;
  if (!config_.snapshot.empty()) {
    store_->restore(load_snapshot(config_.snapshot));
  } else if (store_->read_table("teams").rows.empty()) {
    sync();
  }
}

Runtime::~Runtime() {
  if (scheduler_) scheduler_->cancel();
}

DetailFetch Runtime::detail_fetch() {
  return [this](std::int64_t player_id, std::string_view table) { return ingestor_->fetch_player_detail(player_id, table); };
}

std::vector<IngestReport> Runtime::sync() { return ingestor_->sync_persistent(); }

void Runtime::start_refresh() {
  if (config_.refresh_cron.empty() || scheduler_) return;
  scheduler_ = std::make_unique<RefreshScheduler>(CronExpr::parse(config_.refresh_cron), [this] {
    try {
      for (const auto& r : sync()) audit(report_line(r));
    } catch (const std::exception& e) {
      audit(std::string("refresh failed: ") + e.what());
    }
  });
  scheduler_->start();
}

void Runtime::audit(const std::string& line) {
  std::lock_guard lock(audit_mutex_);
  if (audit_out_.is_open()) {
    audit_out_ << utc_now_iso8601() << " " << line << "\n";
    audit_out_.flush();
  }
}

}  // namespace dsqa
