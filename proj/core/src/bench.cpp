#include "dsqa/bench.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json_util.hpp"

#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using detail::json;

std::string like_literal(std::string_view name) {
  std::string out = "'";
  for (char c : ascii_lower(name)) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string prediction_to_json(const BenchPrediction& p) {
  json j{{"item_id", p.item_id},
         {"answer", p.answer ? detail::answer_to_json(*p.answer) : json(nullptr)},
         {"sql", p.sql},
         {"stage", p.stage},
         {"error", p.error}};
  return j.dump();
}

BenchPrediction prediction_from_json(std::string_view line) {
  try {
    auto j = json::parse(line);
    BenchPrediction p;
    p.item_id = j.at("item_id").get<std::string>();
    if (j.contains("answer") && !j.at("answer").is_null()) p.answer = detail::answer_from_json(j.at("answer"));
    p.sql = j.value("sql", "");
    p.stage = j.value("stage", "");
    p.error = j.value("error", "");
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad prediction: ") + e.what());
  }
}

std::string export_predictions(std::vector<BenchPrediction> predictions) {
  std::sort(predictions.begin(), predictions.end(), [](const auto& a, const auto& b) { return a.item_id < b.item_id; });
  std::string out;
  for (const auto& p : predictions) out += prediction_to_json(p) + "\n";
  return out;
}

std::vector<BenchPrediction> import_predictions(std::string_view text) {
  std::vector<BenchPrediction> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty()) out.push_back(prediction_from_json(line));
  }
  return out;
}

std::vector<BenchPrediction> predict_items(const Pipeline& pipeline, const std::vector<BenchmarkItem>& items,
                                           const BenchProgress& progress, const std::atomic<bool>* cancel) {
  std::vector<BenchPrediction> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (cancel && cancel->load()) break;
    const auto& item = items[i];
    BenchPrediction p;
    p.item_id = item.item_id;
    QaOptions options;
    options.visualize = false;
    options.render_image = false;
    options.expected = item.answer_type;
    try {
      auto r = pipeline.answer_question(item.question, options);
      p.answer = std::move(r.answer);
      p.sql = std::move(r.sql);
    } catch (const StageError& e) {
      p.stage = e.stage();
      p.error = e.what();
      p.sql = e.sql();
    }
    out.push_back(std::move(p));
    if (progress) progress(i + 1, items.size());
  }
  return out;
}

std::vector<EvalResult> score_predictions(const std::vector<BenchmarkItem>& items,
                                          const std::vector<BenchPrediction>& predictions) {
  std::map<std::string, const BenchPrediction*> by_id;
  for (const auto& p : predictions) by_id[p.item_id] = &p;
  std::vector<EvalResult> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    auto it = by_id.find(item.item_id);
    if (it == by_id.end()) {
      out.push_back(evaluate_item(item, std::nullopt, "no prediction"));
    } else {
      out.push_back(evaluate_item(item, it->second->answer, it->second->error));
    }
  }
  return out;
}

std::vector<BenchPrediction> gold_predictions(const std::vector<BenchmarkItem>& items) {
  std::vector<BenchPrediction> out;
  for (const auto& item : items) out.push_back({item.item_id, item.gold_answer, item.gold_sql, "", ""});
  return out;
}

std::string seed_lookup_reply(const BenchmarkItem& item, Store& store) {
  std::vector<std::string> cores;
  auto names = [&](const std::string& sql) {
    std::set<std::string> out;
    for (const auto& row : store.query(sql).rows) out.insert(render_value(row[0]));
    return out;
  };
  auto build = [&](const char* table, const char* id_col, const char* name_col, const std::vector<std::int64_t>& ids) {
    if (ids.empty()) return;
    std::string in;
    for (auto id : ids) in += (in.empty() ? "" : ", ") + std::to_string(id);
    auto found = names(std::string("SELECT ") + name_col + " FROM " + table + " WHERE " + id_col + " IN (" + in + ")");
    std::string where;
    for (const auto& n : found)
      where += (where.empty() ? "" : " OR ") + std::string("LOWER(") + name_col + ") LIKE " + like_literal(n);
    if (!where.empty())
      cores.push_back(std::string("SELECT ") + id_col + ", " + name_col + " FROM " + table + " WHERE " + where);
  };
  build("players", "player_id", "web_name", item.player_ids);
  build("teams", "team_id", "team_name", item.team_ids);
  if (cores.empty()) return "NONE";
  std::string out;
  for (const auto& c : cores) out += (out.empty() ? "" : " UNION ") + c;
  return out;
}

std::size_t seed_mock(Store& store, const PipelineAssets& assets, DetailFetch fetch, Recorder& recorder,
                      const std::vector<BenchmarkItem>& items) {
  std::set<std::string> digests;
  for (const auto& item : items) {
    auto written = record_question_fixtures(store, assets, fetch, recorder, item.question,
                                            seed_lookup_reply(item, store), item.gold_sql, std::nullopt);
    digests.insert(written.begin(), written.end());
  }
  return digests.size();
}

}  // namespace dsqa
