#include <gtest/gtest.h>

#include "dsqa/entity.hpp"
#include "dsqa/error.hpp"
#include "dsqa/executor.hpp"
#include "dsqa/planner.hpp"
#include "test_support.hpp"

using namespace dsqa;
using dsqa::test_support::data_path;
using dsqa::test_support::ScriptedProvider;

namespace {

class ResolvePlanTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dsqa::test_support::load_bundled(store);
    source = std::make_unique<ReplaySource>(dsqa::test_support::fpl_fixtures());
    ingestor = std::make_unique<Ingestor>(store, *source, FieldMap::load(data_path("field_map.json")));
  }

  DetailFetch fetch() {
    return [this](std::int64_t pid, std::string_view table) {
      ++fetches;
      return ingestor->fetch_player_detail(pid, table);
    };
  }

  std::shared_ptr<ScriptedProvider> reply(std::string text) {
    return std::make_shared<ScriptedProvider>([text](const CompletionRequest&) { return text; });
  }

  Store store;
  std::unique_ptr<ReplaySource> source;
  std::unique_ptr<Ingestor> ingestor;
  std::atomic<int> fetches{0};
};

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

TEST(LookupSql, AcceptsLikeFiltersOnNameColumns) {
  auto branches = check_lookup_sql(
      "SELECT player_id, web_name FROM players WHERE LOWER(web_name) LIKE '%salah%' OR LOWER(second_name) LIKE "
      "'%salah%' UNION SELECT team_id, team_name FROM teams WHERE team_name LIKE '%pool%'",
      default_catalog());
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_EQ(branches[0].table, "players");
  EXPECT_EQ(branches[0].forms.size(), 2u);
  EXPECT_EQ(branches[1].table, "teams");
}

TEST(LookupSql, RejectsAnythingElse) {
  for (const char* bad : {
           "SELECT player_id FROM players",                                           // no filter
           "SELECT player_id FROM players WHERE goals_scored > 3",                   // not a name LIKE
           "SELECT player_id FROM players WHERE LOWER(first_name) = 'mo'",           // equality
           "SELECT p.player_id FROM players p JOIN teams t ON p.team_id = t.team_id WHERE t.team_name LIKE '%a%'",
           "SELECT player_id FROM player_history WHERE season_name LIKE '%20%'",     // not a reference table
           "DELETE FROM players",
           "SELECT player_id FROM players WHERE web_name LIKE '%a%'; SELECT 1",
       }) {
    try {
      check_lookup_sql(bad, default_catalog());
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Resolution) << bad;
      EXPECT_EQ(e.detail(), bad);
    }
  }
}

TEST_F(ResolvePlanTest, ResolverGroundsPlayersIntoTheSession) {
  Gateway gw(reply("```sql\nSELECT player_id, web_name FROM players WHERE LOWER(web_name) LIKE '%milner%'\n```"));
  std::vector<std::string> audit;
  EntityResolver resolver(store, gw, load_prompt(data_path("prompts"), "entity_lookup"),
                          [&](const std::string& line) { audit.push_back(line); });
  auto session = store.open_session();
  auto r = resolver.resolve("Give me the player history table for James Milner.", session);
  ASSERT_EQ(r.players.size(), 1u);
  EXPECT_EQ(r.players[0].id, 25);
  EXPECT_EQ(r.players[0].name, "Milner");
  EXPECT_FALSE(r.ambiguous);
  EXPECT_EQ(session.player_ids, std::vector<std::int64_t>{25});
  ASSERT_EQ(audit.size(), 1u);
  EXPECT_NE(audit[0].find("candidates=1"), std::string::npos);
  EXPECT_NE(describe_entities(r).find("Milner"), std::string::npos);
}

TEST_F(ResolvePlanTest, NoneMeansNoEntities) {
  Gateway gw(reply("NONE"));
  EntityResolver resolver(store, gw, load_prompt(data_path("prompts"), "entity_lookup"));
  auto session = store.open_session();
  auto r = resolver.resolve("Which team is top of the league?", session);
  EXPECT_TRUE(r.empty());
  EXPECT_TRUE(r.lookup_sql.empty());
  EXPECT_TRUE(session.player_ids.empty());
}

TEST_F(ResolvePlanTest, BroadPatternsAreAmbiguousAndCapped) {
  Gateway gw(reply("SELECT player_id, web_name FROM players WHERE LOWER(web_name) LIKE '%a%'"));
  EntityResolver resolver(store, gw, load_prompt(data_path("prompts"), "entity_lookup"));
  auto session = store.open_session();
  auto r = resolver.resolve("anyone with an a", session);
  EXPECT_TRUE(r.ambiguous);
  EXPECT_EQ(r.players.size(), kMaxCandidates);
  EXPECT_EQ(session.player_ids.size(), kMaxCandidates);
}

TEST_F(ResolvePlanTest, PlannerRetriesOnceAfterProse) {
  int n = 0;
  auto provider = std::make_shared<ScriptedProvider>([&](const CompletionRequest&) -> std::string {
    return ++n == 1 ? "Sure! The answer uses the players table." : "SELECT web_name FROM players LIMIT 3";
  });
  Gateway gw(provider);
  SqlPlanner planner(gw, store.catalog(), PromptHints::load(data_path("hints.toml")),
                     load_prompt(data_path("prompts"), "sql_gen"));
  auto plan = planner.plan("three players", {});
  EXPECT_EQ(plan.attempts, 2);
  EXPECT_EQ(plan.sql.text, "SELECT web_name FROM players LIMIT 3");
  ASSERT_EQ(provider->requests.size(), 2u);
  auto& retry = provider->requests[1].user_prompt;
  EXPECT_EQ(retry.substr(retry.size() - kReturnOnlySql.size()), kReturnOnlySql);
}

TEST_F(ResolvePlanTest, PlannerDoesNotRetrySemanticErrors) {
  auto provider = reply("SELECT goals FROM players");
  Gateway gw(provider);
  SqlPlanner planner(gw, store.catalog(), PromptHints::load(data_path("hints.toml")),
                     load_prompt(data_path("prompts"), "sql_gen"));
  try {
    planner.plan("goals", {});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownIdentifier);
    EXPECT_EQ(e.detail(), "SELECT goals FROM players");
  }
  EXPECT_EQ(provider->calls[PromptTag::SqlGen], 1);

  auto prose = reply("I cannot answer that.");
  Gateway gw2(prose);
  SqlPlanner stubborn(gw2, store.catalog(), PromptHints::load(data_path("hints.toml")),
                      load_prompt(data_path("prompts"), "sql_gen"));
  EXPECT_EQ(code_of([&] { stubborn.plan("x", {}); }), ErrorCode::Syntax);
  EXPECT_EQ(prose->calls[PromptTag::SqlGen], 2);
}

TEST_F(ResolvePlanTest, SqlPromptCarriesSchemaHintsAndEntities) {
  ResolvedEntities e;
  e.players.push_back({71, "Haaland", "%haaland%"});
  auto req = build_sql_prompt("How many goals has Haaland scored?", e, store.catalog(),
                              PromptHints::load(data_path("hints.toml")), load_prompt(data_path("prompts"), "sql_gen"));
  auto all = req.system_prompt + req.user_prompt;
  EXPECT_NE(all.find("player_history"), std::string::npos);
  EXPECT_NE(all.find("teams.position"), std::string::npos);
  EXPECT_NE(all.find("Haaland"), std::string::npos);
  EXPECT_EQ(req.tag, PromptTag::SqlGen);
}

TEST_F(ResolvePlanTest, JitMaterializesOnDemand) {
  Executor exec(store, fetch());
  auto sql = sql::validate_sql("SELECT season_name, total_points FROM player_history ORDER BY season_name", store.catalog());
  auto size = store.storage_size();
  auto id = store.content_id();

  auto session = store.open_session();
  session.player_ids = {25};
  ExecutionTrace trace;
  auto frame = exec.execute(sql, session, &trace);
  EXPECT_TRUE(trace.jit);
  EXPECT_EQ(trace.executions, 2);
  EXPECT_EQ(trace.fetch_calls, 1u);
  EXPECT_EQ(trace.fetched_tables, std::vector<std::string>{"player_history"});
  EXPECT_EQ(frame.row_count(), 18u);
  EXPECT_EQ(store.storage_size(), size);
  EXPECT_EQ(store.content_id(), id);

  // Already materialized: no second fetch.
  ExecutionTrace again;
  exec.execute(sql, session, &again);
  EXPECT_FALSE(again.jit);
  EXPECT_EQ(again.fetch_calls, 0u);
  session.close();

  auto pre = store.open_session();
  pre.player_ids = {25};
  exec.materialize({"player_history"}, pre);
  EXPECT_EQ(canonical_bytes(exec.execute(sql, pre)), canonical_bytes(frame));
}

TEST_F(ResolvePlanTest, JitWithoutPlayerIsAmbiguousScope) {
  Executor exec(store, fetch());
  auto sql = sql::validate_sql("SELECT * FROM player_past", store.catalog());
  auto session = store.open_session();
  EXPECT_EQ(code_of([&] { exec.execute(sql, session); }), ErrorCode::Planning);
  EXPECT_EQ(fetches.load(), 0);
}

TEST_F(ResolvePlanTest, JitCapsPlayerFanOut) {
  Executor exec(store, fetch());
  auto sql = sql::validate_sql("SELECT COUNT(DISTINCT player_id) FROM player_future", store.catalog());
  auto session = store.open_session();
  for (std::int64_t id = 1; id <= 15; ++id) session.player_ids.push_back(id);
  ExecutionTrace trace;
  exec.execute(sql, session, &trace);
  EXPECT_EQ(trace.fetch_calls, kMaxJitPlayers);
}

TEST_F(ResolvePlanTest, AnswerShapes) {
  auto scalar = make_frame({"n"}, {ColumnType::Integer}, {{std::int64_t{21}}});
  auto a = answer_from_frame(scalar, AnswerType::Scalar);
  EXPECT_EQ(a.kind, AnswerType::Scalar);
  EXPECT_EQ(a.text(), "21");
  auto wide = make_frame({"a", "b"}, {ColumnType::Integer, ColumnType::Integer}, {{std::int64_t{1}, std::int64_t{2}}});
  auto m = answer_from_frame(wide, AnswerType::Scalar);
  EXPECT_EQ(m.kind, AnswerType::Table);
  EXPECT_TRUE(m.shape_mismatch);
  EXPECT_EQ(answer_from_frame(scalar, AnswerType::Table).kind, AnswerType::Table);
}
