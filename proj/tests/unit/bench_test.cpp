#include <gtest/gtest.h>

#include "dsqa/bench.hpp"
#include "dsqa/error.hpp"
#include "test_support.hpp"

using namespace dsqa;
using dsqa::test_support::data_path;
using dsqa::test_support::read_text;

namespace {

std::vector<BenchmarkItem> desk() { return import_items(read_text(data_path("bench/desk.jsonl"))); }

}  // namespace

TEST(Predictions, JsonRoundTrip) {
  BenchPrediction ok;
  ok.item_id = "t02-001-r1";
  ok.answer = AnswerValue{};
  ok.answer->kind = AnswerType::Scalar;
  ok.answer->scalar = std::int64_t{21};
  ok.sql = "SELECT 21";
  BenchPrediction failed;
  failed.item_id = "t02-001-r2";
  failed.stage = "plan";
  failed.error = "no sql";
  auto text = export_predictions({ok, failed});
  auto back = import_predictions(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(prediction_to_json(back[0]), prediction_to_json(ok));
  EXPECT_EQ(prediction_to_json(back[1]), prediction_to_json(failed));
  EXPECT_FALSE(back[1].answer);
  EXPECT_THROW(prediction_from_json("{"), Error);
}

TEST(Predictions, GoldScoresPerfectly) {
  auto items = desk();
  auto results = score_predictions(items, gold_predictions(items));
  ASSERT_EQ(results.size(), items.size());
  auto rep = aggregate(results);
  EXPECT_DOUBLE_EQ(rep.string_em, 100.0);
  EXPECT_DOUBLE_EQ(rep.table.overall, 1.0);
  EXPECT_EQ(rep.n_errors, 0u);
}

TEST(Predictions, MissingPredictionIsAnError) {
  auto items = desk();
  items.resize(3);
  auto preds = gold_predictions(items);
  preds.pop_back();
  auto results = score_predictions(items, preds);
  EXPECT_EQ(results[2].error, "no prediction");
  EXPECT_FALSE(results[2].correct());
  EXPECT_TRUE(results[0].correct());
}

TEST(Predictions, MockPipelineReproducesGold) {
  auto rt = dsqa::test_support::mock_runtime();
  auto items = desk();
  std::vector<BenchmarkItem> sample;
  for (std::size_t i = 0; i < items.size(); i += 15) sample.push_back(items[i]);
  std::size_t progress_calls = 0;
  auto preds = predict_items(rt->pipeline(), sample, [&](std::size_t, std::size_t) { ++progress_calls; });
  EXPECT_EQ(progress_calls, sample.size());
  auto results = score_predictions(sample, preds);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_TRUE(results[i].error.empty()) << sample[i].item_id << ": " << results[i].error;
    EXPECT_TRUE(results[i].correct()) << sample[i].item_id;
  }
  EXPECT_EQ(rt->store().open_session_count(), 0u);
}

TEST(Predictions, CancelStopsEarly) {
  auto rt = dsqa::test_support::mock_runtime();
  auto items = desk();
  std::atomic<bool> cancel{true};
  EXPECT_TRUE(predict_items(rt->pipeline(), items, {}, &cancel).empty());
}

TEST(SeedLookup, NamesEntitiesOrNone) {
  Store store;
  dsqa::test_support::load_bundled(store);
  BenchmarkItem none;
  EXPECT_EQ(seed_lookup_reply(none, store), "NONE");
  BenchmarkItem milner;
  milner.player_ids = {25};
  auto reply = seed_lookup_reply(milner, store);
  EXPECT_NE(reply.find("ilner"), std::string::npos) << reply;
  EXPECT_NO_THROW(check_lookup_sql(reply, store.catalog())) << reply;
}
