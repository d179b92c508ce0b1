#include <benchmark/benchmark.h>

#include <random>

#include "dsqa/config.hpp"
#include "dsqa/evaluator.hpp"
#include "dsqa/executor.hpp"
#include "dsqa/runtime.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/visualizer.hpp"

using namespace dsqa;

namespace {

Runtime& runtime() {
  static Runtime rt(AppConfig::defaults(DSQA_DATA_DIR));
  return rt;
}

ResultFrame keyed_frame(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> names{"name"};
  std::vector<std::optional<ColumnType>> types{ColumnType::Text};
  for (std::size_t c = 0; c < cols; ++c) {
    names.push_back("c" + std::to_string(c));
    types.push_back(ColumnType::Integer);
  }
  std::vector<Row> data;
  for (std::size_t r = 0; r < rows; ++r) {
    Row row{std::string("player") + std::to_string(r)};
    for (std::size_t c = 0; c < cols; ++c) row.push_back(static_cast<std::int64_t>(rng() % 10));
    data.push_back(std::move(row));
  }
  return make_frame(names, types, std::move(data));
}

void BM_ValidateSql(benchmark::State& state) {
  auto catalog = default_catalog();
  const std::string text =
      "SELECT p.web_name, t.team_name, SUM(p.goals_scored) AS g FROM players p JOIN teams t ON p.team_id = t.team_id "
      "WHERE p.minutes > 900 AND t.strength >= 3 GROUP BY p.web_name, t.team_name ORDER BY g DESC LIMIT 10";
  for (auto _ : state) benchmark::DoNotOptimize(sql::validate_sql(text, catalog));
}
BENCHMARK(BM_ValidateSql);

void BM_StoreQuery(benchmark::State& state) {
  auto& store = runtime().store();
  for (auto _ : state)
    benchmark::DoNotOptimize(store.query("SELECT web_name, goals_scored FROM players ORDER BY goals_scored DESC LIMIT 10"));
}
BENCHMARK(BM_StoreQuery);

void BM_JitExecute(benchmark::State& state) {
  auto& rt = runtime();
  Executor exec(rt.store(), rt.detail_fetch());
  auto sql = sql::validate_sql("SELECT season_name, total_points FROM player_history", rt.store().catalog());
  for (auto _ : state) {
    auto session = rt.store().open_session();
    session.player_ids = {25};
    benchmark::DoNotOptimize(exec.execute(sql, session));
  }
}
BENCHMARK(BM_JitExecute);

void BM_AnswerQuestion(benchmark::State& state) {
  auto& rt = runtime();
  for (auto _ : state)
    benchmark::DoNotOptimize(rt.pipeline().answer_question("Show me the top 10 goal scorers and their goal count."));
}
BENCHMARK(BM_AnswerQuestion);

void BM_TableEval(benchmark::State& state) {
  auto rows = static_cast<std::size_t>(state.range(0));
  auto gold = keyed_frame(rows, 8, 1);
  auto pred = keyed_frame(rows, 8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(table_eval(pred, gold));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TableEval)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_CanonicalBytes(benchmark::State& state) {
  auto frame = keyed_frame(static_cast<std::size_t>(state.range(0)), 8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_bytes(frame));
}
BENCHMARK(BM_CanonicalBytes)->Arg(100)->Arg(10000);

void BM_RenderSvg(benchmark::State& state) {
  auto frame = keyed_frame(20, 1, 4);
  ChartSpec spec;
  spec.kind = ChartKind::HorizontalBar;
  spec.x = "name";
  spec.y = {"c0"};
  spec.data = canonical_bytes(frame);
  for (auto _ : state) benchmark::DoNotOptimize(render_svg(spec));
}
BENCHMARK(BM_RenderSvg);

void BM_Wilson(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(wilson_interval(93, 100));
}
BENCHMARK(BM_Wilson);

}  // namespace

BENCHMARK_MAIN();
