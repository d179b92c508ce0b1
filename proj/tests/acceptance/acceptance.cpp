// Acceptance checks for the QA engine. Prints one PASS/FAIL line per
// criterion and exits non-zero when any fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "dsqa/bench.hpp"
#include "dsqa/benchgen.hpp"
#include "dsqa/config.hpp"
#include "dsqa/error.hpp"
#include "dsqa/evaluator.hpp"
#include "dsqa/executor.hpp"
#include "dsqa/ingest.hpp"
#include "dsqa/pipeline.hpp"
#include "dsqa/runtime.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/visualizer.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace dsqa;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  template <typename A, typename B>
  void equal(const A& a, const B& b, const std::string& what) {
    if (!(a == b)) {
      std::ostringstream os;
      os << what << " (got " << a << ", want " << b << ")";
      failures.push_back(os.str());
    }
  }
};

std::string data(const std::string& rel) { return (fs::path(DSQA_DATA_DIR) / rel).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json raw(const std::string& name) { return json::parse(slurp(data("fixtures/fpl/" + name))); }

AppConfig mock_config() { return AppConfig::defaults(DSQA_DATA_DIR); }

std::vector<std::optional<ColumnType>> types_of(std::initializer_list<ColumnType> t) { return {t.begin(), t.end()}; }

// ------------------------------------------------------------ 1

void e2e_fixtures(Check& c) {
  auto start = std::chrono::steady_clock::now();
  Runtime rt(mock_config());
  auto bootstrap = raw("bootstrap-static.json");

  // Top 10 scorers: players in id order, stable sort by goals descending.
  std::vector<json> players(bootstrap["elements"].begin(), bootstrap["elements"].end());
  std::stable_sort(players.begin(), players.end(),
                   [](const json& a, const json& b) { return a["goals_scored"].get<int>() > b["goals_scored"].get<int>(); });
  std::vector<Row> top;
  for (std::size_t i = 0; i < 10; ++i)
    top.push_back({players[i]["web_name"].get<std::string>(), players[i]["goals_scored"].get<std::int64_t>()});
  auto want_top = make_frame({"web_name", "goals_scored"}, types_of({ColumnType::Text, ColumnType::Integer}), top);
  const std::vector<std::pair<std::string, int>> paper_top = {
      {"M.Salah", 27}, {"Haaland", 21}, {"Isak", 20},  {"Wood", 18},  {"Mbeumo", 16},
      {"Watkins", 14}, {"Wissa", 14},   {"Palmer", 14}, {"Cunha", 14}, {"Mateta", 13}};

  auto r1 = rt.pipeline().answer_question("Show me the top 10 goal scorers and their goal count.");
  c.equal(canonical_bytes(r1.answer.table), canonical_bytes(want_top), "top-10 frame vs raw payload");
  c.equal(r1.answer.table.row_count(), std::size_t{10}, "top-10 row count");
  for (std::size_t i = 0; i < paper_top.size() && i < r1.answer.table.row_count(); ++i) {
    const auto& row = r1.answer.table.rows[i];
    c.equal(render_value(row[0]), paper_top[i].first, "top-10 name row " + std::to_string(i));
    c.equal(render_value(row[1]), std::to_string(paper_top[i].second), "top-10 goals row " + std::to_string(i));
  }

  // Milner history: the element summary's history_past in season order.
  auto summary = raw("element-summary_25.json");
  std::vector<Row> hist;
  for (const auto& s : summary["history_past"])
    hist.push_back({std::int64_t{25}, s["season_name"].get<std::string>(), s["total_points"].get<std::int64_t>(),
                    s["minutes"].get<std::int64_t>(), s["goals_scored"].get<std::int64_t>(),
                    s["assists"].get<std::int64_t>(), s["clean_sheets"].get<std::int64_t>(),
                    s["yellow_cards"].get<std::int64_t>(), s["red_cards"].get<std::int64_t>(),
                    s["saves"].get<std::int64_t>()});
  std::sort(hist.begin(), hist.end(), [](const Row& a, const Row& b) {
    return std::get<std::string>(a[1]) < std::get<std::string>(b[1]);
  });
  auto want_hist = make_frame({"player_id", "season_name", "total_points", "minutes", "goals_scored", "assists",
                               "clean_sheets", "yellow_cards", "red_cards", "saves"},
                              std::vector<std::optional<ColumnType>>(10, ColumnType::Integer), hist);
  want_hist.columns[1].type = ColumnType::Text;
  auto size = rt.store().storage_size();
  auto r2 = rt.pipeline().answer_question("Give me the player history table for James Milner.");
  c.equal(canonical_bytes(r2.answer.table), canonical_bytes(want_hist), "Milner history frame vs raw payload");
  c.equal(r2.answer.table.row_count(), std::size_t{18}, "Milner history rows");
  if (!r2.answer.table.rows.empty()) {
    const auto& first = r2.answer.table.rows[0];
    c.equal(render_value(first[1]) + " " + render_value(first[2]) + " " + render_value(first[3]) + " " +
                render_value(first[4]) + " " + render_value(first[5]) + " " + render_value(first[6]),
            std::string("2006/07 114 2675 3 7 0"), "Milner 2006/07 row");
  }
  c.equal(rt.store().storage_size(), size, "storage size after JIT query");

  // Teams scatter source: teams in id order.
  std::vector<Row> teams;
  for (const auto& t : bootstrap["teams"])
    teams.push_back({t["name"].get<std::string>(), t["position"].get<std::int64_t>(), t["points"].get<std::int64_t>(),
                     t["strength"].get<std::int64_t>()});
  std::sort(teams.begin(), teams.end(), [&](const Row& a, const Row& b) {
    auto id = [&](const Row& r) {
      for (const auto& t : bootstrap["teams"])
        if (t["name"] == std::get<std::string>(r[0])) return t["id"].get<int>();
      return 0;
    };
    return id(a) < id(b);
  });
  auto want_teams = make_frame({"team_name", "position", "points", "strength"},
                               types_of({ColumnType::Text, ColumnType::Integer, ColumnType::Integer, ColumnType::Integer}),
                               teams);
  auto r3 = rt.pipeline().answer_question(
      "Show me the team names, positions, points, and strength in a color scatterplot.");
  c.equal(canonical_bytes(r3.answer.table), canonical_bytes(want_teams), "teams frame vs raw payload");
  c.equal(r3.answer.table.row_count(), std::size_t{20}, "teams rows");
  if (!r3.answer.table.rows.empty()) {
    const auto& row = r3.answer.table.rows[0];
    c.equal(render_value(row[0]) + " " + render_value(row[1]) + " " + render_value(row[2]) + " " + render_value(row[3]),
            std::string("Liverpool 1 76 5"), "Liverpool row");
  }
  c.expect(r3.chart && r3.chart->kind == ChartKind::Scatter, "teams chart is a scatter");

  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s exceeds 10 s");
}

// ------------------------------------------------------------ 2

void jit_equivalence(Check& c) {
  Store store;
  store.apply_schema(default_catalog());
  auto source = std::make_shared<ReplaySource>(data("fixtures/fpl"));
  Ingestor ingestor(store, *source, FieldMap::load(data("field_map.json")));
  ingestor.sync_persistent();
  std::atomic<int> fetches{0};
  Executor exec(store, [&](std::int64_t pid, std::string_view table) {
    ++fetches;
    return ingestor.fetch_player_detail(pid, table);
  });

  const std::vector<std::string> queries = {
      "SELECT * FROM player_history",
      "SELECT season_name, total_points FROM player_history ORDER BY total_points DESC",
      "SELECT SUM(total_points) FROM player_history",
      "SELECT COUNT(*) FROM player_past WHERE goals_scored > 0",
      "SELECT event, minutes FROM player_past ORDER BY event DESC LIMIT 5",
      "SELECT AVG(minutes) FROM player_past",
      "SELECT event_name, difficulty FROM player_future ORDER BY event",
      "SELECT COUNT(*) FROM player_future WHERE difficulty >= 4",
      "SELECT p.web_name, h.season_name FROM players p JOIN player_history h ON p.player_id = h.player_id",
      "SELECT player_id, MAX(goals_scored) FROM player_past GROUP BY player_id",
  };
  const std::vector<std::vector<std::int64_t>> scopes = {{25}, {71}, {25, 71}};
  auto size = store.storage_size();
  auto id = store.content_id();
  std::size_t compared = 0;
  for (const auto& text : queries) {
    auto sql = sql::validate_sql(text, store.catalog());
    for (const auto& players : scopes) {
      auto jit_session = store.open_session();
      jit_session.player_ids = players;
      ExecutionTrace trace;
      auto jit = exec.execute(sql, jit_session, &trace);
      c.expect(trace.jit, "JIT path taken for " + text);
      jit_session.close();

      auto pre_session = store.open_session();
      pre_session.player_ids = players;
      std::vector<std::string> tables(sql.referenced_tables.begin(), sql.referenced_tables.end());
      std::vector<std::string> ephemeral;
      for (const auto& t : tables)
        if (is_ephemeral_table(t)) ephemeral.push_back(t);
      exec.materialize(ephemeral, pre_session);
      ExecutionTrace pre_trace;
      auto pre = exec.execute(sql, pre_session, &pre_trace);
      c.expect(!pre_trace.jit, "pre-materialized path needed no fetch for " + text);
      pre_session.close();

      c.equal(canonical_bytes(jit), canonical_bytes(pre), "JIT vs pre-materialized frame for " + text);
      c.expect(jit.row_count() > 0, "non-empty frame for " + text);
      c.equal(store.storage_size(), size, "storage size after " + text);
      ++compared;

      // Nothing stays visible once the sessions are closed.
      auto later = store.open_session();
      for (const auto& t : ephemeral) {
        try {
          store.query("SELECT COUNT(*) FROM " + t, &later);
          c.expect(false, t + " visible after its session closed");
        } catch (const Error& e) {
          c.expect(e.code() == ErrorCode::NotMaterialized, t + " raised " + std::string(to_string(e.code())));
        }
      }
      later.close();
    }
  }
  c.expect(compared >= 20, "at least 20 comparisons");
  c.equal(store.open_session_count(), std::size_t{0}, "open sessions");
  c.equal(store.content_id(), id, "content id");
}

// ------------------------------------------------------------ 3

void validator_fuzzing(Check& c) {
  Store store;
  store.apply_schema(default_catalog());
  auto source = std::make_shared<ReplaySource>(data("fixtures/fpl"));
  Ingestor ingestor(store, *source, FieldMap::load(data("field_map.json")));
  ingestor.sync_persistent();
  auto before = canonical_bytes(store.read_table("players")) + canonical_bytes(store.read_table("teams")) +
                canonical_bytes(store.read_table("fixtures"));
  auto size = store.storage_size();

  oracle::SqlGrammar grammar(1);
  std::size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    auto text = grammar.statement();
    try {
      auto v = sql::validate_sql(text, store.catalog());
      store.query(v.text);
      ++ok;
    } catch (const Error& e) {
      c.expect(false, text + ": " + e.what());
    }
  }
  c.equal(ok, std::size_t{1000}, "valid statements accepted and executed");

  std::size_t rejected = 0;
  for (int i = 0; i < 100; ++i) {
    auto [text, family] = grammar.rejected();
    try {
      sql::validate_sql(text, store.catalog());
      c.expect(false, "accepted: " + text);
    } catch (const Error&) {
      ++rejected;
    }
  }
  c.equal(rejected, std::size_t{100}, "mutated statements rejected");
  auto after = canonical_bytes(store.read_table("players")) + canonical_bytes(store.read_table("teams")) +
               canonical_bytes(store.read_table("fixtures"));
  c.expect(after == before, "persistent tables unchanged");
  c.equal(store.storage_size(), size, "storage size");
}

// ------------------------------------------------------------ 4

void metric_oracles(Check& c) {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 200; ++i) {
    bool keyed = rng() % 3 != 0;
    auto gold = oracle::random_frame(rng, 1 + rng() % 25, 1 + rng() % 4, keyed);
    auto pred = oracle::perturb(rng, gold);
    auto want = oracle::brute_force_scores(pred, gold);
    auto got = table_eval(pred, gold);
    auto tag = " pair " + std::to_string(i);
    c.expect(std::fabs(got.correctness - want.correctness) <= 1e-12, "correctness" + tag);
    c.expect(std::fabs(got.completeness - want.completeness) <= 1e-12, "completeness" + tag);
    c.expect(std::fabs(got.overall - want.overall) <= 1e-12, "overall" + tag);
    if (!pred.rows.empty()) {
      auto swapped = table_eval(gold, pred);
      c.expect(std::fabs(swapped.correctness - got.completeness) <= 1e-12 &&
                   std::fabs(swapped.completeness - got.correctness) <= 1e-12 &&
                   std::fabs(swapped.overall - got.overall) <= 1e-12,
               "symmetry" + tag);
    }
    auto shuffled_pred = pred;
    auto shuffled_gold = gold;
    std::shuffle(shuffled_pred.rows.begin(), shuffled_pred.rows.end(), rng);
    std::shuffle(shuffled_gold.rows.begin(), shuffled_gold.rows.end(), rng);
    auto again = table_eval(shuffled_pred, shuffled_gold);
    c.expect(again.overall == got.overall && again.correctness == got.correctness, "row-order invariance" + tag);
  }
  const std::vector<std::tuple<std::string, std::string, int>> em = {
      {"Arsenal", "arsenal", 1},   {"  M.Salah ", "m.salah", 1}, {"21", "21.0", 1},   {"21.50", "21.5", 1},
      {"007", "7", 1},             {"1e2", "100", 1},            {"21", "22", 0},     {"Liverpool", "Liverpool FC", 0},
      {"Nott'm  Forest", "nott'm forest", 1}};
  for (const auto& [a, b, want] : em) c.equal(exact_match(a, b), want, "exact_match('" + a + "', '" + b + "')");
}

// ------------------------------------------------------------ 5

void wilson(Check& c) {
  for (std::size_t n : {1u, 5u, 20u, 100u, 1000u}) {
    c.expect(wilson_interval(0, n).lo == 0.0, "lo = 0 at s = 0, n = " + std::to_string(n));
    c.expect(wilson_interval(n, n).hi == 1.0, "hi = 1 at s = n, n = " + std::to_string(n));
  }
  for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    double last = 2;
    for (std::size_t n = 20; n <= 2000; n += 20) {
      auto s = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
      auto ci = wilson_interval(s, n);
      double width = ci.hi - ci.lo;
      c.expect(width < last, "width shrinks at p=" + std::to_string(p) + " n=" + std::to_string(n));
      last = width;
    }
  }
  auto got = wilson_interval(93, 100);
  auto want = oracle::wilson_quadratic(93, 100);
  c.expect(std::fabs(got.lo - want.lo) <= 1e-9 && std::fabs(got.hi - want.hi) <= 1e-9,
           "(93,100) = [" + std::to_string(got.lo) + ", " + std::to_string(got.hi) + "]");
  for (auto [s, n] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {3, 2}}) {
    try {
      wilson_interval(s, n);
      c.expect(false, "domain error expected");
    } catch (const Error& e) {
      c.expect(e.code() == ErrorCode::Domain, "domain error code");
    }
  }
}

// ------------------------------------------------------------ 6

void benchmark_integrity(Check& c) {
  Runtime rt(mock_config());
  auto& store = rt.store();
  Executor exec(store, rt.detail_fetch());

  auto bootstrap = raw("bootstrap-static.json");
  const char* codes[] = {"", "GKP", "DEF", "MID", "FWD"};
  std::map<std::string, std::size_t> by_pos;
  for (const auto& e : bootstrap["elements"]) {
    ++by_pos[""];
    ++by_pos[codes[e["element_type"].get<int>()]];
  }
  auto pack_text = slurp(data("bench/desk_pack.tpl"));
  auto expected = oracle::expected_pack_items(pack_text, by_pos, bootstrap["teams"].size(), 2);

  auto generated = instantiate(parse_template_pack(pack_text), store, exec);
  c.equal(generated.size(), expected, "template items vs combinatorial count");
  auto manual = load_manual_items(data("bench/manual_items.jsonl"), store, exec);
  generated.insert(generated.end(), manual.begin(), manual.end());

  auto shipped_text = slurp(data("bench/desk.jsonl"));
  auto shipped = import_items(shipped_text);
  c.equal(shipped.size(), generated.size(), "shipped benchmark size");
  c.expect(export_items(generated) == shipped_text, "regenerated benchmark is byte-identical to the shipped one");

  auto failures = verify_gold(shipped, store, exec);
  for (const auto& f : failures) c.expect(false, "gold reproduction " + f.item_id + ": " + f.reason);

  std::map<std::string, std::vector<const BenchmarkItem*>> groups;
  for (const auto& item : shipped) {
    c.equal(item.snapshot_id, store.content_id(), "snapshot pin of " + item.item_id);
    auto tagged = sql::validate_sql(item.gold_sql, store.catalog()).primitives;
    c.expect(tagged == item.primitives, "primitives of " + item.item_id);
    if (!item.template_id.empty()) groups[item.item_id.substr(0, item.item_id.size() - 3)].push_back(&item);
  }
  for (const auto& [base, members] : groups) {
    c.equal(members.size(), std::size_t{3}, "rephrasings of " + base);
    std::set<std::string> questions;
    for (const auto* m : members) {
      questions.insert(m->question);
      c.expect(m->gold_sql == members[0]->gold_sql, "shared gold SQL in " + base);
      c.expect(m->gold_answer.text() == members[0]->gold_answer.text(), "shared gold answer in " + base);
    }
    c.equal(questions.size(), members.size(), "distinct questions in " + base);
  }
}

// ------------------------------------------------------------ 7

void chart_contract(Check& c) {
  auto items = import_items(slurp(data("bench/desk.jsonl")));
  std::size_t built = 0;
  for (const auto& item : items) {
    if (item.answer_type != AnswerType::Table || item.gold_answer.table.rows.empty()) continue;
    const auto& frame = item.gold_answer.table;
    std::string question = "plot " + item.question;
    auto decision = should_visualize(question, frame, item.gold_sql);
    auto rebuild = [&](const ResultFrame& f) {
      return build_chart_spec(question, f, should_visualize(question, f, item.gold_sql), nullptr, nullptr,
                              item.gold_sql)
          .spec;
    };
    auto result = build_chart_spec(question, frame, decision, nullptr, nullptr, item.gold_sql);
    if (!result.spec) continue;
    ++built;
    auto& spec = *result.spec;
    c.expect(validate_chart_data(spec, frame) == ChartValidation::Valid, "built spec valid for " + item.item_id);

    auto corrupted = spec;
    corrupted.data += "corrupt\n";
    c.expect(validate_chart_data(corrupted, frame) == ChartValidation::Mismatch, "corruption detected " + item.item_id);
    int requeries = 0;
    auto settled = settle_chart(
        corrupted, frame,
        [&] {
          ++requeries;
          return frame;
        },
        rebuild);
    c.equal(requeries, 1, "re-queries for " + item.item_id);
    c.expect(settled.spec && validate_chart_data(*settled.spec, settled.frame) == ChartValidation::Valid,
             "settled spec valid for " + item.item_id);

    auto copy = chart_spec_from_json(chart_spec_to_json(spec));
    c.expect(render_svg(spec) == render_svg(copy) && render_svg(spec) == render_svg(spec),
             "identical SVG for " + item.item_id);
  }
  c.expect(built >= 10, "charts built: " + std::to_string(built));
}

// ------------------------------------------------------------ 8

std::string full_run() {
  Runtime rt(mock_config());
  auto items = import_items(slurp(data("bench/desk.jsonl")));
  auto predictions = predict_items(rt.pipeline(), items);
  return report_to_json(aggregate(score_predictions(items, predictions), "mock"));
}

void offline_determinism(Check& c) {
  auto a = full_run();
  auto b = full_run();
  c.expect(a == b, "report JSON differs between runs");
  auto rep = report_from_json(a);
  c.equal(rep.n_items, import_items(slurp(data("bench/desk.jsonl"))).size(), "items in report");
  c.expect(a.find("timing") == std::string::npos, "report carries no timings");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"e2e-fixtures", e2e_fixtures},
      {"jit-equivalence", jit_equivalence},
      {"validator-fuzzing", validator_fuzzing},
      {"metric-oracles", metric_oracles},
      {"wilson-intervals", wilson},
      {"benchmark-integrity", benchmark_integrity},
      {"chart-contract", chart_contract},
      {"offline-determinism", offline_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    if (c.failures.empty()) {
      std::cout << "PASS " << name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << ": " << c.failures.size() << " problem(s)\n";
      for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i) std::cout << "    " << c.failures[i] << "\n";
    }
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
