#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dsqa/bench.hpp"
#include "dsqa/benchgen.hpp"
#include "dsqa/config.hpp"
#include "dsqa/error.hpp"
#include "dsqa/evaluator.hpp"
#include "dsqa/pipeline.hpp"
#include "dsqa/runtime.hpp"
#include "dsqa/service.hpp"
#include "dsqa/text.hpp"

namespace fs = std::filesystem;
using namespace dsqa;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kIngest = 3, kStage = 4, kGold = 5 };

struct Globals {
  std::string config_path;
  std::string data_dir;
  std::string db;
  std::string snapshot;
  std::string llm_dir;
  std::string provider;
  std::string fpl_dir;
  bool record = false;
};

AppConfig build_config(const Globals& g) {
  auto base = AppConfig::defaults(DSQA_DEFAULT_DATA_DIR);
  auto cfg = resolve_config(g.config_path.empty() ? std::nullopt : std::optional(g.config_path), base);
  // Flags win over the config file.
  if (!g.data_dir.empty()) {
    auto fresh = AppConfig::defaults(g.data_dir);
    if (cfg.fpl_fixtures_dir == AppConfig::defaults(cfg.data_dir).fpl_fixtures_dir) cfg.fpl_fixtures_dir = fresh.fpl_fixtures_dir;
    if (cfg.llm.mock_dir == AppConfig::defaults(cfg.data_dir).llm.mock_dir) cfg.llm.mock_dir = fresh.llm.mock_dir;
    cfg.data_dir = g.data_dir;
  }
  if (!g.db.empty()) cfg.db_path = g.db;
  if (!g.snapshot.empty()) cfg.snapshot = g.snapshot;
  if (!g.llm_dir.empty()) cfg.llm.mock_dir = g.llm_dir;
  if (!g.provider.empty()) cfg.llm.kind = g.provider;
  if (!g.fpl_dir.empty()) cfg.fpl_fixtures_dir = g.fpl_dir;
  if (g.record) cfg.record_completions = true;
  return cfg;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_file_atomic(path, text);
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Config: return kConfig;
    case ErrorCode::Ingest: return kIngest;
    default: return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic sports question answering over Fantasy Premier League data"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file (default: $DSQA_CONFIG)");
  app.add_option("--data-dir", g.data_dir, "Prompts, hints, field map and bundled fixtures");
  app.add_option("--db", g.db, "SQLite database file (default: in memory)");
  app.add_option("--snapshot", g.snapshot, "Snapshot archive to load instead of ingesting");
  app.add_option("--llm-fixtures", g.llm_dir, "Directory of recorded completions");
  app.add_option("--provider", g.provider, "Model provider: mock or openai")->check(CLI::IsMember({"mock", "openai"}));
  app.add_option("--fpl-fixtures", g.fpl_dir, "Directory of recorded API payloads");
  app.add_flag("--record", g.record, "Record live completions as mock fixtures");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Data ingest");
  ingest->require_subcommand(1);
  auto* ingest_sync = ingest->add_subcommand("sync", "Refresh players, teams and fixtures");

  // snapshot
  auto* snapshot = app.add_subcommand("snapshot", "Snapshot archives");
  snapshot->require_subcommand(1);
  auto* snap_save = snapshot->add_subcommand("save", "Write the persistent tier to an archive");
  std::string snap_dir;
  snap_save->add_option("dir", snap_dir, "Archive directory")->required();
  auto* snap_show = snapshot->add_subcommand("id", "Print the snapshot id of the loaded data");

  // ask
  auto* ask = app.add_subcommand("ask", "Answer one question");
  std::string question, chart_out;
  bool ask_json = false, no_chart = false;
  ask->add_option("question", question, "Natural-language question")->required();
  ask->add_flag("--json", ask_json, "Print the full response as JSON");
  ask->add_option("--chart-out", chart_out, "Write the chart as SVG");
  ask->add_flag("--no-chart", no_chart, "Skip visualization");

  // schema
  auto* schema = app.add_subcommand("schema", "Print the schema");
  bool schema_json = false;
  schema->add_flag("--json", schema_json, "JSON instead of text");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string bind;
  int port = 0;
  serve->add_option("--bind", bind, "Address to bind");
  serve->add_option("--port", port, "Port");

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark generation and evaluation");
  bench->require_subcommand(1);
  auto* gen = bench->add_subcommand("generate", "Instantiate templates into benchmark items");
  std::string templates, manual, out, snapshot_out;
  std::size_t values_per_slot = 2;
  gen->add_option("--templates", templates, "Template pack")->required();
  gen->add_option("--manual", manual, "Hand-written items (JSONL)");
  gen->add_option("--values-per-slot", values_per_slot, "Values drawn per slot")->check(CLI::PositiveNumber);
  gen->add_option("--out", out, "Output JSONL")->required();
  gen->add_option("--snapshot-out", snapshot_out, "Also archive the snapshot the gold answers were computed on");

  auto* run = bench->add_subcommand("run", "Run and score a benchmark");
  std::string bench_file, predictions_file, run_out, label = "dsqa";
  bool use_gold = false;
  run->add_option("--bench", bench_file, "Benchmark JSONL")->required();
  run->add_option("--predictions", predictions_file, "Score these predictions instead of running the pipeline");
  run->add_flag("--gold", use_gold, "Score the gold answers themselves");
  run->add_option("--out", run_out, "Directory for predictions, results and reports")->required();
  run->add_option("--label", label, "Model label in reports");

  auto* report = bench->add_subcommand("report", "Aggregate scored results");
  std::string results_file, format = "text";
  report->add_option("--results", results_file, "results.jsonl")->required();
  report->add_option("--format", format, "text, json, complexity-csv or heatmap-csv")
      ->check(CLI::IsMember({"text", "json", "complexity-csv", "heatmap-csv"}));
  report->add_option("--label", label, "Model label");

  auto* verify = bench->add_subcommand("verify", "Re-execute gold SQL on the pinned snapshot");
  verify->add_option("--bench", bench_file, "Benchmark JSONL")->required();

  auto* seed = bench->add_subcommand("seed-mock", "Record mock completions that reproduce the gold SQL");
  seed->add_option("--bench", bench_file, "Benchmark JSONL")->required();

  // llm
  auto* llm = app.add_subcommand("llm", "Recorded completions");
  llm->require_subcommand(1);
  auto* rec_q = llm->add_subcommand("record-question", "Record the completions one question needs");
  std::string lookup_reply, sql_reply, chart_reply;
  rec_q->add_option("--question", question, "Question text")->required();
  rec_q->add_option("--lookup", lookup_reply, "Entity lookup reply (SQL or NONE)")->required();
  rec_q->add_option("--sql", sql_reply, "SQL reply")->required();
  rec_q->add_option("--chart", chart_reply, "Chart spec reply (JSON)");

  // Global options may also follow the subcommand.
  std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
    for (auto* sub : a->get_subcommands({})) {
      sub->fallthrough();
      fall(sub);
    }
  };
  fall(&app);

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig cfg;
    try {
      cfg = build_config(g);
    } catch (const Error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kConfig;
    }

    auto open_runtime = [&](bool load = true) {
      try {
        return std::make_unique<Runtime>(cfg, load);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) {
          std::cerr << "config error: " << e.what() << "\n";
          std::exit(kConfig);
        }
        if (e.code() == ErrorCode::Ingest) {
          std::cerr << "ingest error: " << e.what() << "\n";
          std::exit(kIngest);
        }
        throw;
      }
    };

    if (*ingest_sync) {
      auto rt = open_runtime(false);
      try {
        for (const auto& r : rt->sync()) std::cout << report_line(r) << "\n";
      } catch (const Error& e) {
        std::cerr << "ingest error: " << e.what() << "\n";
        return kIngest;
      }
      std::cout << "snapshot_id " << rt->store().content_id() << "\n";
      return kOk;
    }

    if (*snap_save) {
      auto rt = open_runtime();
      auto snap = rt->store().take_snapshot();
      save_snapshot(snap, snap_dir);
      std::cout << snap.snapshot_id << "\n";
      return kOk;
    }
    if (*snap_show) {
      auto rt = open_runtime();
      std::cout << rt->store().content_id() << "\n";
      return kOk;
    }

    if (*schema) {
      const auto& cat = default_catalog();
      std::cout << (schema_json ? catalog_to_json(cat) + "\n" : render_schema_text(cat));
      return kOk;
    }

    if (*ask) {
      auto rt = open_runtime();
      QaOptions options;
      options.visualize = !no_chart;
      options.render_image = !chart_out.empty();
      try {
        auto r = rt->pipeline().answer_question(question, options);
        if (ask_json) {
          std::cout << qa_response_to_json(r) << "\n";
        } else {
          std::cout << "SQL: " << r.sql << "\n\n";
          if (r.answer.kind == AnswerType::Scalar) {
            std::cout << render_value(r.answer.scalar) << "\n";
          } else {
            std::cout << render_text_table(r.answer.table);
          }
          if (r.chart) std::cout << "\nchart: " << to_string(r.chart->kind) << "\n";
          for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        }
        if (!chart_out.empty()) {
          if (r.image) {
            write_out(chart_out, *r.image);
          } else {
            std::cerr << "warning: no chart for this question\n";
          }
        }
        return kOk;
      } catch (const StageError& e) {
        if (ask_json) std::cout << error_envelope_json(e.stage(), e.what(), e.sql().empty() ? e.detail() : e.sql()) << "\n";
        std::cerr << e.what() << "\n";
        if (!e.sql().empty()) std::cerr << "sql: " << e.sql() << "\n";
        return kStage;
      }
    }

    if (*serve) {
      if (!bind.empty()) cfg.bind = bind;
      if (port) cfg.port = port;
      auto rt = open_runtime();
      rt->start_refresh();
      Service service(*rt);
      std::cerr << "listening on " << cfg.bind << ":" << cfg.port << "\n";
      if (!service.listen(cfg.bind, cfg.port)) {
        std::cerr << "cannot bind " << cfg.bind << ":" << cfg.port << "\n";
        return kConfig;
      }
      return kOk;
    }

    if (*gen) {
      auto rt = open_runtime();
      auto pack = load_template_pack(templates);
      InstantiateOptions opts;
      opts.values_per_slot = values_per_slot;
      auto items = instantiate(pack, rt->store(), rt->pipeline().executor(), opts);
      if (!manual.empty()) {
        auto extra = load_manual_items(manual, rt->store(), rt->pipeline().executor());
        items.insert(items.end(), extra.begin(), extra.end());
      }
      std::size_t empty = 0;
      for (const auto& it : items) empty += it.empty_gold;
      write_out(out, export_items(items));
      if (!snapshot_out.empty()) save_snapshot(rt->store().take_snapshot(), snapshot_out);
      std::cerr << items.size() << " items from " << pack.size() << " templates";
      if (empty) std::cerr << " (" << empty << " with empty gold answers)";
      std::cerr << "; snapshot " << rt->store().content_id() << "\n";
      return kOk;
    }

    if (*run) {
      auto items = import_items(read_file(bench_file));
      std::vector<BenchPrediction> predictions;
      if (use_gold) {
        predictions = gold_predictions(items);
      } else if (!predictions_file.empty()) {
        predictions = import_predictions(read_file(predictions_file));
      } else {
        auto rt = open_runtime();
        predictions = predict_items(rt->pipeline(), items, [](std::size_t done, std::size_t total) {
          if (done % 50 == 0 || done == total) std::cerr << "\r" << done << "/" << total << std::flush;
        });
        std::cerr << "\n";
      }
      auto results = score_predictions(items, predictions);
      auto rep = aggregate(results, label);
      fs::create_directories(run_out);
      std::string lines;
      for (const auto& r : results) lines += result_to_json(r) + "\n";
      write_out((fs::path(run_out) / "predictions.jsonl").string(), export_predictions(predictions));
      write_out((fs::path(run_out) / "results.jsonl").string(), lines);
      write_out((fs::path(run_out) / "report.json").string(), report_to_json(rep));
      write_out((fs::path(run_out) / "report.txt").string(), report_text(rep));
      write_out((fs::path(run_out) / "complexity.csv").string(), complexity_csv(rep));
      write_out((fs::path(run_out) / "heatmap.csv").string(), heatmap_csv(rep));
      std::cout << report_text(rep);
      return kOk;
    }

    if (*report) {
      std::vector<EvalResult> results;
      auto text = read_file(results_file);
      std::size_t pos = 0;
      while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
        pos = nl == std::string::npos ? text.size() : nl + 1;
        if (!line.empty()) results.push_back(result_from_json(line));
      }
      auto rep = aggregate(results, label);
      if (format == "json") std::cout << report_to_json(rep);
      else if (format == "complexity-csv") std::cout << complexity_csv(rep);
      else if (format == "heatmap-csv") std::cout << heatmap_csv(rep);
      else std::cout << report_text(rep);
      return kOk;
    }

    if (*verify) {
      auto items = import_items(read_file(bench_file));
      auto rt = open_runtime();
      auto failures = verify_gold(items, rt->store(), rt->pipeline().executor());
      if (!failures.empty()) {
        std::cerr << failures.size() << " of " << items.size() << " gold answers do not reproduce; first: "
                  << failures.front().item_id << ": " << failures.front().reason << "\n";
        return kGold;
      }
      std::cout << "all " << items.size() << " gold answers reproduce on snapshot " << rt->store().content_id() << "\n";
      return kOk;
    }

    if (*seed) {
      auto items = import_items(read_file(bench_file));
      auto rt = open_runtime();
      Recorder recorder(cfg.llm.mock_dir);
      auto n = seed_mock(rt->store(), rt->assets(), rt->detail_fetch(), recorder, items);
      std::cout << n << " completions recorded in " << cfg.llm.mock_dir << "\n";
      return kOk;
    }

    if (*rec_q) {
      auto rt = open_runtime();
      Recorder recorder(cfg.llm.mock_dir);
      auto digests = record_question_fixtures(rt->store(), rt->assets(), rt->detail_fetch(), recorder, question,
                                              lookup_reply, sql_reply,
                                              chart_reply.empty() ? std::nullopt : std::optional(chart_reply));
      for (const auto& d : digests) std::cout << d << "\n";
      return kOk;
    }
  } catch (const StageError& e) {
    std::cerr << e.what() << "\n";
    return kStage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.detail().empty()) std::cerr << e.detail() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
