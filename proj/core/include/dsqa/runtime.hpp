#pragma once

#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dsqa/config.hpp"
#include "dsqa/cron.hpp"
#include "dsqa/gateway.hpp"
#include "dsqa/ingest.hpp"
#include "dsqa/pipeline.hpp"
#include "dsqa/store.hpp"

namespace dsqa {

/// Forwards to another provider and writes each completion as a mock fixture.
class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<Recorder> recorder)
      : inner_(std::move(inner)), recorder_(std::move(recorder)) {}
  std::string name() const override { return inner_->name(); }
  std::string complete(const CompletionRequest& req, bool& truncated) override;

 private:
  std::shared_ptr<Provider> inner_;
  std::shared_ptr<Recorder> recorder_;
};

/// Gateway with the configured default and per-tag providers.
std::unique_ptr<Gateway> make_gateway(const AppConfig& config);

/// Everything a command or the service needs, built from one config.
class Runtime {
 public:
  /// Validates the config, opens the store and loads data: the configured
  /// snapshot if any, else a persistent sync when the store is empty.
  explicit Runtime(AppConfig config, bool load_data = true);
  ~Runtime();

  const AppConfig& config() const { return config_; }
  Store& store() { return *store_; }
  Ingestor& ingestor() { return *ingestor_; }
  const Gateway& gateway() const { return *gateway_; }
  Pipeline& pipeline() { return *pipeline_; }
  const PipelineAssets& assets() const { return pipeline_->assets(); }
  DetailFetch detail_fetch();

  std::vector<IngestReport> sync();
  /// Starts the cron refresh when configured; no-op otherwise.
  void start_refresh();

 private:
  void audit(const std::string& line);

  AppConfig config_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<PayloadSource> source_;
  std::unique_ptr<Ingestor> ingestor_;
  std::unique_ptr<Gateway> gateway_;
  std::unique_ptr<Pipeline> pipeline_;
  std::unique_ptr<RefreshScheduler> scheduler_;
  std::mutex audit_mutex_;
  std::ofstream audit_out_;
};

}  // namespace dsqa
