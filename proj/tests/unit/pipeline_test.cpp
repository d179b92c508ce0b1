#include <gtest/gtest.h>

#include "dsqa/pipeline.hpp"
#include "dsqa/service.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace dsqa;
using nlohmann::json;

namespace {

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { rt = dsqa::test_support::mock_runtime().release(); }
  static void TearDownTestSuite() {
    delete rt;
    rt = nullptr;
  }
  static Runtime* rt;
};

Runtime* PipelineTest::rt = nullptr;

}  // namespace

TEST_F(PipelineTest, TopScorersAreRankedAndCharted) {
  auto r = rt->pipeline().answer_question("Show me the top 10 goal scorers and their goal count.");
  EXPECT_EQ(r.sql, "SELECT web_name, goals_scored FROM players ORDER BY goals_scored DESC LIMIT 10");
  EXPECT_TRUE(r.lookup_sql.empty());
  ASSERT_EQ(r.answer.kind, AnswerType::Table);
  const auto& t = r.answer.table;
  ASSERT_EQ(t.row_count(), 10u);
  EXPECT_EQ(std::get<std::string>(t.rows[0][0]), "M.Salah");
  EXPECT_EQ(std::get<std::int64_t>(t.rows[0][1]), 27);
  auto direct = rt->store().query("SELECT web_name, goals_scored FROM players ORDER BY goals_scored DESC LIMIT 10");
  EXPECT_EQ(canonical_bytes(t), canonical_bytes(direct));
  ASSERT_TRUE(r.chart);
  EXPECT_EQ(r.chart->kind, ChartKind::HorizontalBar);
  EXPECT_EQ(r.chart->data, canonical_bytes(t));
  ASSERT_TRUE(r.image);
  EXPECT_EQ(r.image->rfind("<svg", 0), 0u);
  EXPECT_EQ(rt->store().open_session_count(), 0u);
}

TEST_F(PipelineTest, PlayerHistoryIsFetchedJustInTime) {
  auto size = rt->store().storage_size();
  auto r = rt->pipeline().answer_question("Give me the player history table for James Milner.");
  ASSERT_EQ(r.entities.players.size(), 1u);
  EXPECT_EQ(r.entities.players[0].id, 25);
  EXPECT_EQ(r.materialized_tables, std::vector<std::string>{"player_history"});
  EXPECT_EQ(r.answer.table.row_count(), 18u);
  EXPECT_EQ(r.answer.table.column_count(), 10u);
  ASSERT_TRUE(r.chart);
  EXPECT_EQ(r.chart->kind, ChartKind::Line);
  EXPECT_EQ(r.chart->x, "season_name");
  EXPECT_EQ(rt->store().storage_size(), size);
  EXPECT_EQ(rt->store().open_session_count(), 0u);
}

TEST_F(PipelineTest, ScatterKeepsColorChannel) {
  auto r = rt->pipeline().answer_question(
      "Show me the team names, positions, points, and strength in a color scatterplot.");
  EXPECT_EQ(r.answer.table.row_count(), 20u);
  ASSERT_TRUE(r.chart);
  EXPECT_EQ(r.chart->kind, ChartKind::Scatter);
  EXPECT_EQ(r.chart->color, "strength");
}

TEST_F(PipelineTest, ScalarAnswer) {
  QaOptions opts;
  opts.visualize = false;
  auto r = rt->pipeline().answer_question("How many goals has Haaland scored this season?", opts);
  ASSERT_EQ(r.answer.kind, AnswerType::Scalar);
  EXPECT_EQ(r.answer.text(), "21");
  EXPECT_FALSE(r.chart);

  auto doc = json::parse(qa_response_to_json(r));
  EXPECT_EQ(doc["schema_version"], kQaResponseVersion);
  EXPECT_EQ(doc["answer"]["type"], "scalar");
  EXPECT_EQ(doc["entities"]["players"][0]["player_id"], 71);
  EXPECT_TRUE(doc["chart"].is_null());
  EXPECT_EQ(doc["snapshot_id"], rt->store().content_id());
  EXPECT_TRUE(doc.contains("timings"));
  EXPECT_FALSE(json::parse(qa_response_to_json(r, false)).contains("timings"));
}

TEST_F(PipelineTest, ExpectedScalarOnTableWarns) {
  QaOptions opts;
  opts.visualize = false;
  opts.expected = AnswerType::Scalar;
  auto r = rt->pipeline().answer_question("Show me the top 10 goal scorers and their goal count.", opts);
  EXPECT_TRUE(r.answer.shape_mismatch);
  EXPECT_FALSE(r.warnings.empty());
}

TEST_F(PipelineTest, UnrecordedQuestionFailsAtGateway) {
  try {
    rt->pipeline().answer_question("Who won the 1966 World Cup?");
    ADD_FAILURE();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "gateway");
    EXPECT_EQ(e.cause_code(), ErrorCode::MockMiss);
    auto env = json::parse(error_envelope_json(e.stage(), e.what(), e.detail()));
    EXPECT_EQ(env["stage"], "gateway");
  }
  EXPECT_EQ(rt->store().open_session_count(), 0u);
}

TEST_F(PipelineTest, EmptyQuestionIsInputError) {
  try {
    rt->pipeline().answer_question("   ");
    ADD_FAILURE();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "input");
    EXPECT_EQ(status_for(e), 400);
  }
}

TEST(StageStatus, MapsToHttpCodes) {
  EXPECT_EQ(status_for(StageError("execute", Error(ErrorCode::Timeout, "slow"))), 504);
  EXPECT_EQ(status_for(StageError("plan", Error(ErrorCode::UnknownIdentifier, "x"))), 422);
  EXPECT_EQ(status_for(StageError("input", Error(ErrorCode::Config, "x"))), 400);
}
