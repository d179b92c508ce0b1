#include <gtest/gtest.h>

#include "dsqa/service.hpp"
#include "httplib.h"
#include "json.hpp"
#include "test_support.hpp"

using namespace dsqa;
using dsqa::test_support::TempDir;
using nlohmann::json;

namespace {

AppConfig config_in(const TempDir& dir, std::size_t max_queued = 4) {
  auto c = AppConfig::defaults(DSQA_DATA_DIR);
  c.runs_dir = dir.file("runs");
  c.max_queued_runs = max_queued;
  return c;
}

}  // namespace

TEST(Service, QueryHandler) {
  TempDir dir;
  Runtime rt(config_in(dir));
  Service svc(rt);
  auto ok = svc.query(R"({"question": "How many goals has Haaland scored this season?", "answer_type": "scalar"})");
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(json::parse(ok.body)["answer"]["text"], "21");

  EXPECT_EQ(svc.query("nope").status, 400);
  EXPECT_EQ(svc.query(R"({"q": 1})").status, 400);
  EXPECT_EQ(svc.query(R"({"question": "x", "answer_type": "list"})").status, 400);
  auto miss = svc.query(R"({"question": "Who won the 1966 World Cup?"})");
  EXPECT_EQ(miss.status, 422);
  EXPECT_EQ(json::parse(miss.body)["stage"], "gateway");
}

TEST(Service, SchemaAndHealth) {
  TempDir dir;
  Runtime rt(config_in(dir));
  Service svc(rt);
  auto h = json::parse(svc.health().body);
  EXPECT_EQ(h["tables"]["players"], 108);
  EXPECT_EQ(h["tables"]["teams"], 20);
  EXPECT_EQ(h["tables"]["fixtures"], 380);
  EXPECT_EQ(h["snapshot_id"], rt.store().content_id());
  auto s = svc.schema();
  EXPECT_EQ(s.status, 200);
  EXPECT_NE(s.body.find("player_history"), std::string::npos);
}

TEST(Service, BenchRunLifecycle) {
  TempDir dir;
  Runtime rt(config_in(dir));
  Service svc(rt);
  EXPECT_EQ(svc.bench_run(R"({"benchmark": "../etc"})").status, 400);
  EXPECT_EQ(svc.bench_run(R"({"benchmark": "nothing_here"})").status, 404);
  EXPECT_EQ(svc.bench_run(R"({})").status, 400);
  EXPECT_EQ(svc.bench_report("run-999").status, 404);

  auto submitted = svc.bench_run(R"({"benchmark": "desk", "label": "gold", "use_gold": true})");
  ASSERT_EQ(submitted.status, 202);
  auto id = json::parse(submitted.body)["run_id"].get<std::string>();
  svc.runs().wait_idle();
  auto report = svc.bench_report(id);
  ASSERT_EQ(report.status, 200);
  auto j = json::parse(report.body);
  EXPECT_EQ(j["status"], "done");
  EXPECT_EQ(j["report"]["string_em"], 100.0);
  EXPECT_EQ(j["report"]["label"], "gold");
  for (const char* f : {"status.json", "items.jsonl", "predictions.jsonl", "results.jsonl", "report.json", "report.txt"})
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir.file("runs")) / id / f)) << f;
}

TEST(Service, FullQueueIsConflict) {
  TempDir dir;
  Runtime rt(config_in(dir, 0));
  Service svc(rt);
  auto r = svc.bench_run(R"({"benchmark": "desk", "use_gold": true})");
  EXPECT_EQ(r.status, 409);
}

TEST(RunManager, SurvivesRestart) {
  TempDir dir;
  Runtime rt(config_in(dir));
  std::string done_id;
  {
    BenchRunManager m(rt.pipeline(), dir.file("runs"), 4);
    auto items = import_items(dsqa::test_support::read_text(dsqa::test_support::data_path("bench/desk.jsonl")));
    items.resize(5);
    done_id = m.submit(items, "first", true).run_id;
    m.wait_idle();
  }
  // A run left in the running state is marked failed on restart.
  RunRecord stale;
  stale.run_id = "run-000007";
  stale.status = RunStatus::Running;
  std::filesystem::create_directories(std::filesystem::path(dir.file("runs")) / "run-000007");
  std::ofstream(std::filesystem::path(dir.file("runs")) / "run-000007" / "status.json") << run_record_to_json(stale);

  BenchRunManager again(rt.pipeline(), dir.file("runs"), 4);
  auto first = again.status(done_id);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->status, RunStatus::Done);
  EXPECT_TRUE(again.report_json(done_id));
  auto interrupted = again.status("run-000007");
  ASSERT_TRUE(interrupted);
  EXPECT_EQ(interrupted->status, RunStatus::Failed);
  EXPECT_FALSE(interrupted->error.empty());

  auto items = import_items(dsqa::test_support::read_text(dsqa::test_support::data_path("bench/desk.jsonl")));
  items.resize(1);
  EXPECT_EQ(again.submit(items, "next", true).run_id, "run-000008");
  again.wait_idle();
}

TEST(HttpServer, RoutesAndCors) {
  TempDir dir;
  Runtime rt(config_in(dir));
  Service svc(rt);
  int port = svc.listen_background("127.0.0.1");
  ASSERT_GT(port, 0);
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);

  auto health = cli.Get("/api/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

  auto q = cli.Post("/api/query", R"({"question": "Show me the top 10 goal scorers and their goal count."})",
                    "application/json");
  ASSERT_TRUE(q);
  EXPECT_EQ(q->status, 200);
  auto body = json::parse(q->body);
  EXPECT_EQ(body["chart"]["kind"], "horizontal_bar");

  auto bad = cli.Post("/api/query", "{}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto pre = cli.Options("/api/query");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);

  auto schema = cli.Get("/api/schema");
  ASSERT_TRUE(schema);
  EXPECT_EQ(schema->status, 200);

  auto missing = cli.Get("/api/bench/report/run-404");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  svc.stop();
}
