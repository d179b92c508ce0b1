#include "dsqa/evaluator.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <tuple>

#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char c = s[0];
  if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (*end || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json scores_json(const TableScores& s) {
  return {{"correctness", s.correctness}, {"completeness", s.completeness}, {"overall", s.overall}};
}

TableScores scores_from(const json& j) {
  return {j.at("correctness").get<double>(), j.at("completeness").get<double>(), j.at("overall").get<double>()};
}

json combo_json(const ComboStat& c) { return {{"n", c.n}, {"successes", c.successes}, {"accuracy", c.accuracy}}; }

ComboStat combo_from(const json& j) {
  return {j.at("n").get<std::size_t>(), j.at("successes").get<std::size_t>(), j.at("accuracy").get<double>()};
}

void add(ComboStat& c, bool ok) {
  ++c.n;
  if (ok) ++c.successes;
}

void finish(ComboStat& c) { c.accuracy = c.n ? static_cast<double>(c.successes) / static_cast<double>(c.n) : 0.0; }

}  // namespace

std::string normalize_scalar(std::string_view text) {
  auto s = ascii_lower(collapse_whitespace(trim(text)));
  if (auto n = parse_number(s)) {
    double v = *n;
    if (v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    return render_real(v);
  }
  return s;
}

int exact_match(std::string_view predicted, std::string_view gold) {
  return normalize_scalar(predicted) == normalize_scalar(gold) ? 1 : 0;
}

std::optional<std::size_t> key_column(const ResultFrame& frame) {
  if (frame.column_count() < 2) return std::nullopt;
  for (std::size_t i = 0; i < frame.column_count(); ++i)
    if (frame.columns[i].type == ColumnType::Text) return i;
  return std::nullopt;
}

std::vector<AtomicStatement> decompose(const ResultFrame& frame) {
  auto key = key_column(frame);
  std::set<AtomicStatement> out;
  for (const auto& row : frame.rows) {
    std::vector<std::string> k;
    if (key) {
      k.push_back(normalize_scalar(render_value(row[*key])));
    } else {
      for (const auto& v : row) k.push_back(normalize_scalar(render_value(v)));
    }
    for (std::size_t c = 0; c < frame.column_count(); ++c) {
      if (key && c == *key) continue;
      out.insert({k, normalize_scalar(frame.columns[c].name), normalize_scalar(render_value(row[c]))});
    }
  }
  return {out.begin(), out.end()};
}

bool NormalizedMatcher::values_match(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  auto x = parse_number(a), y = parse_number(b);
  if (!x || !y) return false;
  return std::fabs(*x - *y) <= tol_ * std::max(std::fabs(*x), std::fabs(*y));
}

bool NormalizedMatcher::matches(const AtomicStatement& p, const AtomicStatement& g) const {
  return p.key == g.key && p.column == g.column && values_match(p.value, g.value);
}

TableScores table_eval(const ResultFrame& predicted, const ResultFrame& gold, const StatementMatcher* matcher) {
  auto gold_stmts = decompose(gold);
  if (gold_stmts.empty())
    throw Error(ErrorCode::UndefinedGold, "gold table has no atomic statements");
  auto pred_stmts = decompose(predicted);
  if (pred_stmts.empty()) return {};

  std::vector<bool> gold_hit(gold_stmts.size(), false);
  std::size_t pred_hits = 0;
  if (matcher) {
    for (const auto& p : pred_stmts) {
      bool hit = false;
      for (std::size_t g = 0; g < gold_stmts.size(); ++g)
        if (matcher->matches(p, gold_stmts[g])) hit = gold_hit[g] = true;
      if (hit) ++pred_hits;
    }
  } else {
    // Same result as the generic loop, indexed by (key, column).
    NormalizedMatcher m;
    std::map<std::pair<std::vector<std::string>, std::string>, std::vector<std::size_t>> index;
    for (std::size_t g = 0; g < gold_stmts.size(); ++g) index[{gold_stmts[g].key, gold_stmts[g].column}].push_back(g);
    for (const auto& p : pred_stmts) {
      auto it = index.find({p.key, p.column});
      if (it == index.end()) continue;
      bool hit = false;
      for (auto g : it->second)
        if (m.values_match(p.value, gold_stmts[g].value)) hit = gold_hit[g] = true;
      if (hit) ++pred_hits;
    }
  }
  auto gold_hits = static_cast<std::size_t>(std::count(gold_hit.begin(), gold_hit.end(), true));
  TableScores s;
  s.correctness = static_cast<double>(pred_hits) / static_cast<double>(pred_stmts.size());
  s.completeness = static_cast<double>(gold_hits) / static_cast<double>(gold_stmts.size());
  s.overall = s.correctness + s.completeness > 0
                  ? 2 * s.correctness * s.completeness / (s.correctness + s.completeness)
                  : 0.0;
  return s;
}

bool EvalResult::correct() const {
  return kind == AnswerType::Scalar ? em == 1 : scores.overall >= 1.0 - 1e-12;
}

EvalResult evaluate_item(const BenchmarkItem& item, const std::optional<AnswerValue>& predicted,
                         const std::string& error, const StatementMatcher* matcher) {
  EvalResult r;
  r.item_id = item.item_id;
  r.kind = item.answer_type;
  r.primitives = item.primitives;
  r.error = error;
  if (!predicted) return r;
  if (item.answer_type == AnswerType::Scalar) {
    if (predicted->kind == AnswerType::Scalar && !predicted->shape_mismatch)
      r.em = exact_match(render_value(predicted->scalar), render_value(item.gold_answer.scalar));
    return r;
  }
  ResultFrame pred_frame = predicted->table;
  if (predicted->kind == AnswerType::Scalar)
    pred_frame = make_frame({item.gold_answer.table.column_count() == 1 ? item.gold_answer.table.columns[0].name
                                                                          : std::string("value")},
                            {std::nullopt}, {Row{predicted->scalar}});
  if (item.gold_answer.table.rows.empty()) {
    // Empty gold: only an empty prediction is right.
    double v = pred_frame.rows.empty() ? 1.0 : 0.0;
    r.scores = {v, v, v};
    return r;
  }
  r.scores = table_eval(pred_frame, item.gold_answer.table, matcher);
  return r;
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) throw Error(ErrorCode::Domain, "Wilson interval needs n > 0");
  if (successes > n) throw Error(ErrorCode::Domain, "successes exceed trials");
  double nn = static_cast<double>(n);
  double p = static_cast<double>(successes) / nn;
  double z2 = z * z;
  double denom = 1 + z2 / nn;
  double center = (p + z2 / (2 * nn)) / denom;
  double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) ci.lo = 0.0;
  if (successes == n) ci.hi = 1.0;
  return ci;
}

EvalReport aggregate(std::vector<EvalResult> results, std::string label) {
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.item_id < b.item_id; });
  EvalReport rep;
  rep.label = std::move(label);
  rep.n_items = results.size();
  double em_sum = 0;
  TableScores sum;
  std::map<std::size_t, ComboStat> by_count;
  for (const auto& r : results) {
    if (!r.error.empty()) ++rep.n_errors;
    bool ok = r.correct();
    if (r.kind == AnswerType::Scalar) {
      ++rep.n_scalar;
      em_sum += r.em;
    } else {
      ++rep.n_table;
      sum.correctness += r.scores.correctness;
      sum.completeness += r.scores.completeness;
      sum.overall += r.scores.overall;
    }
    auto names = sql::primitive_names(r.primitives);
    std::sort(names.begin(), names.end());
    std::string combo;
    for (const auto& n : names) combo += (combo.empty() ? "" : "+") + n;
    add(rep.by_combination[combo], ok);
    add(by_count[r.primitives.size()], ok);
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i; j < names.size(); ++j) add(rep.heatmap[{names[i], names[j]}], ok);
  }
  if (rep.n_scalar) rep.string_em = 100.0 * em_sum / static_cast<double>(rep.n_scalar);
  if (rep.n_table) {
    double n = static_cast<double>(rep.n_table);
    rep.table = {sum.correctness / n, sum.completeness / n, sum.overall / n};
  }
  for (auto& [k, c] : rep.by_combination) finish(c);
  for (auto& [k, c] : rep.heatmap) finish(c);
  for (auto& [count, c] : by_count) {
    finish(c);
    rep.by_complexity.push_back({count, c.n, c.successes, c.accuracy, wilson_interval(c.successes, c.n)});
  }
  return rep;
}

std::string report_to_json(const EvalReport& r) {
  json combos = json::object();
  for (const auto& [k, c] : r.by_combination) combos[k] = combo_json(c);
  json complexity = json::array();
  for (const auto& p : r.by_complexity)
    complexity.push_back({{"primitive_count", p.primitive_count},
                          {"n", p.n},
                          {"successes", p.successes},
                          {"accuracy", p.accuracy},
                          {"ci_lo", p.ci.lo},
                          {"ci_hi", p.ci.hi}});
  json heat = json::array();
  for (const auto& [k, c] : r.heatmap) {
    auto cell = combo_json(c);
    cell["a"] = k.first;
    cell["b"] = k.second;
    heat.push_back(std::move(cell));
  }
  json j{{"label", r.label},
         {"n_items", r.n_items},
         {"n_scalar", r.n_scalar},
         {"n_table", r.n_table},
         {"n_errors", r.n_errors},
         {"string_em", r.string_em},
         {"table", scores_json(r.table)},
         {"by_combination", combos},
         {"by_complexity", complexity},
         {"heatmap", heat}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    EvalReport r;
    r.label = j.at("label").get<std::string>();
    r.n_items = j.at("n_items").get<std::size_t>();
    r.n_scalar = j.at("n_scalar").get<std::size_t>();
    r.n_table = j.at("n_table").get<std::size_t>();
    r.n_errors = j.value("n_errors", std::size_t{0});
    r.string_em = j.at("string_em").get<double>();
    r.table = scores_from(j.at("table"));
    for (const auto& [k, v] : j.at("by_combination").items()) r.by_combination[k] = combo_from(v);
    for (const auto& p : j.at("by_complexity"))
      r.by_complexity.push_back({p.at("primitive_count").get<std::size_t>(), p.at("n").get<std::size_t>(),
                                 p.at("successes").get<std::size_t>(), p.at("accuracy").get<double>(),
                                 {p.at("ci_lo").get<double>(), p.at("ci_hi").get<double>()}});
    for (const auto& c : j.at("heatmap"))
      r.heatmap[{c.at("a").get<std::string>(), c.at("b").get<std::string>()}] = combo_from(c);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad report: ") + e.what());
  }
}

std::string report_text(const EvalReport& r) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-16s  %9s  %11s  %12s  %7s\n", "Model", "String EM", "Correctness", "Completeness",
                "Overall");
  out += line;
  std::snprintf(line, sizeof line, "%-16s  %9s  %11s  %12s  %7s\n", r.label.c_str(), fmt("%.2f", r.string_em).c_str(),
                fmt("%.2f", r.table.correctness).c_str(), fmt("%.2f", r.table.completeness).c_str(),
                fmt("%.2f", r.table.overall).c_str());
  out += line;
  std::snprintf(line, sizeof line, "\nitems %zu (scalar %zu, table %zu, errors %zu)\n", r.n_items, r.n_scalar, r.n_table,
                r.n_errors);
  out += line;
  if (!r.by_complexity.empty()) {
    out += "\nprimitives  n      accuracy  95% CI\n";
    for (const auto& p : r.by_complexity) {
      std::snprintf(line, sizeof line, "%-10zu  %-5zu  %8.3f  [%.3f, %.3f]\n", p.primitive_count, p.n, p.accuracy,
                    p.ci.lo, p.ci.hi);
      out += line;
    }
  }
  return out;
}

std::string complexity_csv(const EvalReport& r) {
  std::string out = "primitive_count,n,successes,accuracy,ci_lo,ci_hi\n";
  for (const auto& p : r.by_complexity)
    out += std::to_string(p.primitive_count) + "," + std::to_string(p.n) + "," + std::to_string(p.successes) + "," +
           fmt("%.6f", p.accuracy) + "," + fmt("%.6f", p.ci.lo) + "," + fmt("%.6f", p.ci.hi) + "\n";
  return out;
}

std::string heatmap_csv(const EvalReport& r) {
  std::string out = "a,b,n,successes,accuracy\n";
  for (const auto& [k, c] : r.heatmap)
    out += k.first + "," + k.second + "," + std::to_string(c.n) + "," + std::to_string(c.successes) + "," +
           fmt("%.6f", c.accuracy) + "\n";
  return out;
}

std::string result_to_json(const EvalResult& r) {
  json j{{"item_id", r.item_id},
         {"kind", std::string(to_string(r.kind))},
         {"em", r.em},
         {"scores", scores_json(r.scores)},
         {"primitives", sql::primitive_names(r.primitives)},
         {"error", r.error}};
  return j.dump();
}

EvalResult result_from_json(std::string_view line) {
  try {
    auto j = json::parse(line);
    EvalResult r;
    r.item_id = j.at("item_id").get<std::string>();
    r.kind = answer_type_from_string(j.at("kind").get<std::string>());
    r.em = j.at("em").get<int>();
    r.scores = scores_from(j.at("scores"));
    r.primitives = sql::primitives_from_names(j.at("primitives").get<std::vector<std::string>>());
    r.error = j.value("error", "");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad eval result: ") + e.what());
  }
}

}  // namespace dsqa
