#include <gtest/gtest.h>

#include <cstdlib>

#include "dsqa/config.hpp"
#include "dsqa/error.hpp"
#include "test_support.hpp"

using namespace dsqa;
using dsqa::test_support::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

}  // namespace

TEST(Config, DefaultsPointIntoDataDir) {
  auto c = AppConfig::defaults(DSQA_DATA_DIR);
  EXPECT_EQ(c.ingest_mode, IngestMode::Replay);
  EXPECT_EQ(c.llm.kind, "mock");
  EXPECT_NE(c.fpl_fixtures_dir.find("fixtures"), std::string::npos);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, JsonOverridesAndRelativePaths) {
  auto c = config_from_json(R"({
    "db_path": "state/dsqa.db",
    "query_timeout_ms": 2500,
    "ingest": {"mode": "replay", "refresh_cron": "*/15 * * * *"},
    "llm": {"kind": "mock", "record": true, "per_tag": {"chart_gen": {"kind": "mock", "mock_dir": "llm2"}}},
    "server": {"port": 9090, "runs_dir": "runs", "max_queued_runs": 2}
  })",
                            AppConfig::defaults(DSQA_DATA_DIR), "/etc/dsqa");
  EXPECT_EQ(c.db_path, "/etc/dsqa/state/dsqa.db");
  EXPECT_EQ(c.query_timeout, std::chrono::milliseconds(2500));
  EXPECT_EQ(c.refresh_cron, "*/15 * * * *");
  EXPECT_TRUE(c.record_completions);
  ASSERT_TRUE(c.llm_per_tag.count(PromptTag::ChartGen));
  EXPECT_EQ(c.llm_per_tag.at(PromptTag::ChartGen).mock_dir, "/etc/dsqa/llm2");
  EXPECT_EQ(c.port, 9090);
  EXPECT_EQ(c.runs_dir, "/etc/dsqa/runs");
  EXPECT_EQ(c.max_queued_runs, 2u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto base = AppConfig::defaults(DSQA_DATA_DIR);
  EXPECT_EQ(code_of([&] { config_from_json(R"({"colour": 1})", base); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { config_from_json(R"({"server": {"prot": 1}})", base); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { config_from_json(R"({"ingest": {"mode": "sometimes"}})", base); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { config_from_json(R"({"port": "x"})", base); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { config_from_json("not json", base); }), ErrorCode::Config);
}

TEST(Config, ValidateChecksModes) {
  auto c = AppConfig::defaults(DSQA_DATA_DIR);
  c.port = 70000;
  EXPECT_EQ(code_of([&] { validate_config(c); }), ErrorCode::Config);
  c = AppConfig::defaults(DSQA_DATA_DIR);
  c.refresh_cron = "every minute";
  EXPECT_EQ(code_of([&] { validate_config(c); }), ErrorCode::Config);
  c = AppConfig::defaults(DSQA_DATA_DIR);
  c.llm.kind = "openai";
  c.llm.api_key_env = "DSQA_TEST_KEY_THAT_IS_NOT_SET";
  EXPECT_EQ(code_of([&] { validate_config(c); }), ErrorCode::Config);
  c = AppConfig::defaults("/nonexistent/dir");
  EXPECT_EQ(code_of([&] { validate_config(c); }), ErrorCode::Config);
}

TEST(Config, ResolvePrefersExplicitThenEnvironment) {
  TempDir dir;
  {
    std::ofstream(dir.file("a.json")) << R"({"server": {"port": 1111}})";
    std::ofstream(dir.file("b.json")) << R"({"server": {"port": 2222}})";
  }
  auto base = AppConfig::defaults(DSQA_DATA_DIR);
  ::unsetenv(kConfigEnv);
  EXPECT_EQ(resolve_config(std::nullopt, base).port, base.port);
  ::setenv(kConfigEnv, dir.file("b.json").c_str(), 1);
  EXPECT_EQ(resolve_config(std::nullopt, base).port, 2222);
  EXPECT_EQ(resolve_config(dir.file("a.json"), base).port, 1111);
  ::unsetenv(kConfigEnv);
  EXPECT_EQ(code_of([&] { load_config_file(dir.file("missing.json"), base); }), ErrorCode::Config);
}
