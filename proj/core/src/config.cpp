#include "dsqa/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

#include "json.hpp"

#include "dsqa/cron.hpp"
#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::Config, where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw Error(ErrorCode::Config, "unknown config key '" + where + (where.empty() ? "" : ".") + k + "'");
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty() || p == ":memory:" || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Config, "config key '" + where + key + "' has the wrong type");
  }
}

void apply_provider(const json& obj, ProviderConfig& p, const std::string& where, const std::string& base_dir) {
  check_keys(obj, {"kind", "mock_dir", "base_url", "model", "api_key_env", "record", "per_tag"}, where);
  if (obj.contains("kind")) p.kind = get<std::string>(obj, "kind", where + ".");
  if (obj.contains("mock_dir")) p.mock_dir = resolve_path(get<std::string>(obj, "mock_dir", where + "."), base_dir);
  if (obj.contains("base_url")) p.base_url = get<std::string>(obj, "base_url", where + ".");
  if (obj.contains("model")) p.model = get<std::string>(obj, "model", where + ".");
  if (obj.contains("api_key_env")) p.api_key_env = get<std::string>(obj, "api_key_env", where + ".");
}

}  // namespace

AppConfig AppConfig::defaults(std::string data_dir) {
  AppConfig c;
  c.data_dir = std::move(data_dir);
  c.fpl_fixtures_dir = (fs::path(c.data_dir) / "fixtures" / "fpl").string();
  c.llm.mock_dir = (fs::path(c.data_dir) / "fixtures" / "llm").string();
  return c;
}

AppConfig config_from_json(std::string_view text, AppConfig c, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"data_dir", "db_path", "snapshot", "ingest", "llm", "query_timeout_ms", "storage_budget_bytes", "server",
                 "audit_log"},
             "");
  if (j.contains("data_dir")) {
    auto old = c.data_dir;
    c.data_dir = resolve_path(get<std::string>(j, "data_dir", ""), base_dir);
    // Derived defaults follow the data directory unless set explicitly.
    auto fresh = AppConfig::defaults(c.data_dir);
    if (c.fpl_fixtures_dir == AppConfig::defaults(old).fpl_fixtures_dir) c.fpl_fixtures_dir = fresh.fpl_fixtures_dir;
    if (c.llm.mock_dir == AppConfig::defaults(old).llm.mock_dir) c.llm.mock_dir = fresh.llm.mock_dir;
  }
  if (j.contains("db_path")) c.db_path = resolve_path(get<std::string>(j, "db_path", ""), base_dir);
  if (j.contains("snapshot")) c.snapshot = resolve_path(get<std::string>(j, "snapshot", ""), base_dir);
  if (j.contains("audit_log")) c.audit_log = resolve_path(get<std::string>(j, "audit_log", ""), base_dir);
  if (j.contains("query_timeout_ms")) {
    auto ms = get<std::int64_t>(j, "query_timeout_ms", "");
    if (ms <= 0) throw Error(ErrorCode::Config, "query_timeout_ms must be positive");
    c.query_timeout = std::chrono::milliseconds(ms);
  }
  if (j.contains("storage_budget_bytes")) c.storage_budget = get<std::uint64_t>(j, "storage_budget_bytes", "");

  if (j.contains("ingest")) {
    const auto& in = j.at("ingest");
    check_keys(in, {"mode", "fixtures_dir", "base_url", "refresh_cron"}, "ingest");
    if (in.contains("mode")) {
      auto mode = get<std::string>(in, "mode", "ingest.");
      if (mode == "replay") c.ingest_mode = IngestMode::Replay;
      else if (mode == "live") c.ingest_mode = IngestMode::Live;
      else throw Error(ErrorCode::Config, "ingest.mode must be replay or live");
    }
    if (in.contains("fixtures_dir")) c.fpl_fixtures_dir = resolve_path(get<std::string>(in, "fixtures_dir", "ingest."), base_dir);
    if (in.contains("base_url")) c.api_base_url = get<std::string>(in, "base_url", "ingest.");
    if (in.contains("refresh_cron")) c.refresh_cron = get<std::string>(in, "refresh_cron", "ingest.");
  }

  if (j.contains("llm")) {
    const auto& llm = j.at("llm");
    apply_provider(llm, c.llm, "llm", base_dir);
    if (llm.contains("record")) c.record_completions = get<bool>(llm, "record", "llm.");
    if (llm.contains("per_tag")) {
      const auto& per = llm.at("per_tag");
      check_keys(per, {"entity_lookup", "sql_gen", "chart_gen"}, "llm.per_tag");
      for (const auto& [tag, obj] : per.items()) {
        ProviderConfig p = c.llm;
        apply_provider(obj, p, "llm.per_tag." + tag, base_dir);
        c.llm_per_tag[prompt_tag_from_string(tag)] = p;
      }
    }
  }

  if (j.contains("server")) {
    const auto& s = j.at("server");
    check_keys(s, {"bind", "port", "runs_dir", "max_queued_runs"}, "server");
    if (s.contains("bind")) c.bind = get<std::string>(s, "bind", "server.");
    if (s.contains("port")) c.port = get<int>(s, "port", "server.");
    if (s.contains("runs_dir")) c.runs_dir = resolve_path(get<std::string>(s, "runs_dir", "server."), base_dir);
    if (s.contains("max_queued_runs")) c.max_queued_runs = get<std::size_t>(s, "max_queued_runs", "server.");
  }
  return c;
}

AppConfig load_config_file(const std::string& path, AppConfig base) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, "cannot read config " + path + ": " + e.what());
  }
  auto dir = fs::path(path).parent_path().string();
  return config_from_json(text, std::move(base), dir.empty() ? "." : dir);
}

AppConfig resolve_config(const std::optional<std::string>& explicit_path, AppConfig base) {
  if (explicit_path && !explicit_path->empty()) return load_config_file(*explicit_path, std::move(base));
  if (const char* env = std::getenv(kConfigEnv); env && *env) return load_config_file(env, std::move(base));
  return base;
}

void validate_config(const AppConfig& c) {
  auto need_dir = [](const std::string& dir, const std::string& what) {
    if (dir.empty() || !fs::is_directory(dir)) throw Error(ErrorCode::Config, what + " '" + dir + "' is not a directory");
  };
  need_dir(c.data_dir, "data_dir");
  if (c.ingest_mode == IngestMode::Replay && c.snapshot.empty()) need_dir(c.fpl_fixtures_dir, "ingest.fixtures_dir");
  if (!c.snapshot.empty()) need_dir(c.snapshot, "snapshot");
  auto check_provider = [&](const ProviderConfig& p, const std::string& where) {
    if (p.kind == "mock") {
      need_dir(p.mock_dir, where + ".mock_dir");
    } else if (p.kind == "openai") {
      const char* key = std::getenv(p.api_key_env.c_str());
      if (!key || !*key)
        throw Error(ErrorCode::Config, where + ": environment variable " + p.api_key_env + " is not set");
    } else {
      throw Error(ErrorCode::Config, where + ".kind must be mock or openai");
    }
  };
  check_provider(c.llm, "llm");
  for (const auto& [tag, p] : c.llm_per_tag) check_provider(p, "llm.per_tag." + std::string(to_string(tag)));
  if (c.port <= 0 || c.port > 65535) throw Error(ErrorCode::Config, "server.port out of range");
  if (!c.refresh_cron.empty()) {
    try {
      (void)CronExpr::parse(c.refresh_cron);
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, std::string("ingest.refresh_cron: ") + e.what());
    }
  }
}

}  // namespace dsqa
