#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dsqa/gateway.hpp"
#include "dsqa/ingest.hpp"
#include "dsqa/store.hpp"

namespace dsqa {

/// Environment variable naming the config file when --config is absent.
inline constexpr const char* kConfigEnv = "DSQA_CONFIG";

struct AppConfig {
  std::string data_dir;                 // prompts, hints, field map, bundled fixtures
  std::string db_path = ":memory:";
  std::string snapshot;                 // archive restored at startup when set

  IngestMode ingest_mode = IngestMode::Replay;
  std::string fpl_fixtures_dir;         // replay payloads; default <data_dir>/fixtures/fpl
  std::string api_base_url = "https://fantasy.premierleague.com/api/";
  std::string refresh_cron;             // empty = no scheduled refresh

  ProviderConfig llm;                   // mock_dir defaults to <data_dir>/fixtures/llm
  std::map<PromptTag, ProviderConfig> llm_per_tag;
  bool record_completions = false;      // write live completions as mock fixtures

  std::chrono::milliseconds query_timeout{10000};
  std::uint64_t storage_budget = kDefaultStorageBudget;

  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string runs_dir = "runs";
  std::size_t max_queued_runs = 4;

  std::string audit_log;                // empty = audit lines are dropped

  /// Defaults with `data_dir` filled in.
  static AppConfig defaults(std::string data_dir);
};

/// Applies a JSON document over `base`. Unknown keys raise Error(Config);
/// relative paths are resolved against `base_dir`.
AppConfig config_from_json(std::string_view text, AppConfig base, const std::string& base_dir = ".");

/// Reads `path`; Error(Config) when it cannot be read or parsed.
AppConfig load_config_file(const std::string& path, AppConfig base);

/// Picks the file from `explicit_path`, then $DSQA_CONFIG, else returns
/// `base` unchanged.
AppConfig resolve_config(const std::optional<std::string>& explicit_path, AppConfig base);

/// Checks paths and credentials the selected modes need. Throws Error(Config).
void validate_config(const AppConfig& config);

}  // namespace dsqa
