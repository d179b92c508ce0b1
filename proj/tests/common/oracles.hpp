#pragma once

// Test-side reference implementations. They share no code with the library
// beyond the frame and value types, so agreement with them is evidence rather
// than a tautology.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsqa/frame.hpp"
#include "dsqa/value.hpp"

namespace dsqa::oracle {

// ------------------------------------------------------------ table metric

struct Scores {
  double correctness = 0;
  double completeness = 0;
  double overall = 0;
};

inline std::string cell_text(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<std::string>(v)) {
    std::string s = std::get<std::string>(v);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }
  if (std::holds_alternative<Null>(v)) return "<null>";
  throw std::logic_error("oracle frames hold integers, text and nulls only");
}

/// Statements as flat strings "key|column|value". The key is the leftmost
/// text column when the frame has at least two columns, else the whole row.
inline std::set<std::string> statements(const ResultFrame& f) {
  int key = -1;
  if (f.columns.size() >= 2)
    for (std::size_t c = 0; c < f.columns.size(); ++c)
      if (f.columns[c].type == ColumnType::Text) {
        key = static_cast<int>(c);
        break;
      }
  std::set<std::string> out;
  for (const auto& row : f.rows) {
    std::string k;
    if (key >= 0) {
      k = cell_text(row[static_cast<std::size_t>(key)]);
    } else {
      for (const auto& v : row) k += cell_text(v) + "\x1e";
    }
    for (std::size_t c = 0; c < f.columns.size(); ++c) {
      if (static_cast<int>(c) == key) continue;
      std::string col = f.columns[c].name;
      for (auto& ch : col) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      out.insert(k + "\x1f" + col + "\x1f" + cell_text(row[c]));
    }
  }
  return out;
}

/// Nested-loop precision, recall and F1.
inline Scores brute_force_scores(const ResultFrame& pred, const ResultFrame& gold) {
  auto p = statements(pred);
  auto g = statements(gold);
  Scores s;
  if (p.empty()) return s;
  std::size_t hit_p = 0, hit_g = 0;
  for (const auto& a : p)
    for (const auto& b : g)
      if (a == b) {
        ++hit_p;
        break;
      }
  for (const auto& b : g)
    for (const auto& a : p)
      if (a == b) {
        ++hit_g;
        break;
      }
  s.correctness = static_cast<double>(hit_p) / static_cast<double>(p.size());
  s.completeness = static_cast<double>(hit_g) / static_cast<double>(g.size());
  s.overall = s.correctness + s.completeness == 0
                  ? 0
                  : 2 * s.correctness * s.completeness / (s.correctness + s.completeness);
  return s;
}

/// Random frame of small lower-case text and integer cells. Names are unique
/// per row so keyed frames have one statement per (row, column).
inline ResultFrame random_frame(std::mt19937_64& rng, std::size_t rows, std::size_t numeric_cols, bool keyed) {
  std::vector<std::string> names;
  std::vector<std::optional<ColumnType>> types;
  if (keyed) {
    names.push_back("name");
    types.push_back(ColumnType::Text);
  }
  for (std::size_t c = 0; c < numeric_cols; ++c) {
    names.push_back("v" + std::to_string(c));
    types.push_back(ColumnType::Integer);
  }
  std::vector<Row> data;
  std::vector<int> ids(40);
  for (int i = 0; i < 40; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t r = 0; r < rows; ++r) {
    Row row;
    if (keyed) row.push_back(std::string("p") + std::to_string(ids[r % ids.size()]));
    for (std::size_t c = 0; c < numeric_cols; ++c) row.push_back(static_cast<std::int64_t>(rng() % 5));
    data.push_back(std::move(row));
  }
  return make_frame(names, types, std::move(data));
}

/// Prediction derived from `gold`: rows dropped, cells changed, rows added,
/// then shuffled.
inline ResultFrame perturb(std::mt19937_64& rng, const ResultFrame& gold) {
  ResultFrame p = gold;
  std::vector<Row> rows;
  for (auto row : p.rows) {
    if (rng() % 5 == 0) continue;
    for (std::size_t c = 0; c < row.size(); ++c)
      if (p.columns[c].type == ColumnType::Integer && rng() % 6 == 0)
        row[c] = static_cast<std::int64_t>(rng() % 5);
    rows.push_back(std::move(row));
  }
  std::size_t extra = rng() % 3;
  for (std::size_t e = 0; e < extra; ++e) {
    Row row;
    for (const auto& col : p.columns) {
      if (col.type == ColumnType::Text) row.push_back(std::string("x") + std::to_string(rng() % 50));
      else row.push_back(static_cast<std::int64_t>(rng() % 5));
    }
    rows.push_back(std::move(row));
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  p.rows = std::move(rows);
  return p;
}

// ------------------------------------------------------------ Wilson

struct Bounds {
  double lo = 0;
  double hi = 0;
};

/// Roots of (p_hat - p)^2 = z^2 p (1 - p) / n, solved as a quadratic in p.
inline Bounds wilson_quadratic(std::size_t s, std::size_t n, double z = 1.96) {
  double ph = static_cast<double>(s) / static_cast<double>(n);
  double k = z * z / static_cast<double>(n);
  double a = 1 + k;
  double b = -(2 * ph + k);
  double c = ph * ph;
  double disc = std::sqrt(std::max(0.0, b * b - 4 * a * c));
  return {(-b - disc) / (2 * a), (-b + disc) / (2 * a)};
}

// ------------------------------------------------------------ benchmark size

/// Expected item count for a template pack, read straight from the pack text:
/// 3 x the product over slots of min(values_per_slot, domain size).
/// `players_by_position` holds counts keyed by position code plus "" for all.
inline std::size_t expected_pack_items(const std::string& pack, const std::map<std::string, std::size_t>& players_by_position,
                                       std::size_t n_teams, std::size_t values_per_slot) {
  std::size_t total = 0;
  std::istringstream in(pack);
  std::string line;
  static const std::regex slot_re(R"(\{([A-Za-z_][A-Za-z0-9_]*)(?::([a-z]+)\s*([^}]*))?\})");
  while (std::getline(in, line)) {
    if (line.rfind("question:", 0) != 0) continue;
    std::set<std::string> seen;
    std::size_t product = 1;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), slot_re); it != std::sregex_iterator(); ++it) {
      std::string name = (*it)[1];
      std::string kind = (*it)[2].matched ? std::string((*it)[2]) : name;
      std::string arg = (*it)[3].matched ? std::string((*it)[3]) : "";
      if (!seen.insert(name).second) continue;
      std::size_t domain = 0;
      if (kind == "player") {
        while (!arg.empty() && std::isspace(static_cast<unsigned char>(arg.back()))) arg.pop_back();
        domain = players_by_position.at(arg);
      } else if (kind == "team") {
        domain = n_teams;
      } else if (kind == "int") {
        long lo = 0, hi = 0;
        std::sscanf(arg.c_str(), "%ld..%ld", &lo, &hi);
        domain = static_cast<std::size_t>(hi - lo + 1);
      } else if (kind == "choice") {
        domain = static_cast<std::size_t>(std::count(arg.begin(), arg.end(), '|')) + 1;
      } else {
        throw std::logic_error("unknown slot kind " + kind);
      }
      product *= std::min(values_per_slot, domain);
    }
    total += 3 * product;
  }
  return total;
}

// ------------------------------------------------------------ SQL grammar

/// Random statements from a small grammar over the persistent tables.
class SqlGrammar {
 public:
  explicit SqlGrammar(std::uint64_t seed) : rng_(seed) {}

  std::string statement() {
    switch (pick(9)) {
      case 0: return projection();
      case 1: return grouped();
      case 2: return scalar_aggregate();
      case 3: return join();
      case 4: return compound();
      case 5: return scalar_subquery();
      case 6: return in_subquery();
      case 7: return case_expression();
      default: return arithmetic();
    }
  }

  /// A statement the engine must refuse, with the expected error family:
  /// "read-only", "multiple", "unsupported" or "unknown".
  std::pair<std::string, std::string> rejected() {
    const auto& t = table();
    auto valid = projection();
    switch (pick(12)) {
      case 0: return {"DELETE FROM " + t.name + where_clause(t), "read-only"};
      case 1: return {"UPDATE " + t.name + " SET " + t.num[0] + " = 0", "read-only"};
      case 2: return {"INSERT INTO " + t.name + " SELECT * FROM " + t.name, "read-only"};
      case 3: return {"DROP TABLE " + t.name, "read-only"};
      case 4: return {"CREATE TABLE copy_" + t.name + " AS " + valid, "read-only"};
      case 5: return {"ALTER TABLE " + t.name + " ADD COLUMN extra INTEGER", "read-only"};
      case 6: return {"ATTACH DATABASE 'other.db' AS other", "read-only"};
      case 7: return {"PRAGMA writable_schema = 1", "read-only"};
      case 8: return {"REPLACE INTO " + t.name + " SELECT * FROM " + t.name, "read-only"};
      case 9:
        // The write-verb scan runs before statements are split.
        if (pick(2)) return {valid + "; DROP TABLE " + t.name, "read-only"};
        return {valid + "; " + projection(), "multiple"};
      case 10: return {"WITH w AS (" + valid + ") SELECT * FROM w", "unsupported"};
      default: {
        auto col = t.num[pick(t.num.size())];
        return {"SELECT " + col + "_x FROM " + t.name, "unknown"};
      }
    }
  }

 private:
  struct Table {
    std::string name;
    std::vector<std::string> num;
    std::vector<std::string> text;
  };

  const Table& table() {
    static const std::vector<Table> k = {
        {"players",
         {"goals_scored", "assists", "minutes", "total_points", "saves", "now_cost", "yellow_cards", "clean_sheets"},
         {"web_name", "player_position", "second_name"}},
        {"teams", {"position", "played", "win", "draw", "loss", "points", "strength"}, {"team_name", "short_name"}},
        {"fixtures", {"game_id", "gw", "team_h_score", "team_a_score"}, {"team_h_name", "team_a_name", "kickoff_time"}},
    };
    return k[pick(k.size())];
  }

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  std::string kw(const char* upper) {
    if (pick(4) != 0) return upper;
    std::string s = upper;
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }
  std::string lit() { return std::to_string(pick(30)); }

  std::string predicate(const Table& t) {
    const char* ops[] = {"=", "<>", "<", "<=", ">", ">=", "!="};
    switch (pick(6)) {
      case 0: return t.num[pick(t.num.size())] + " " + ops[pick(7)] + " " + lit();
      case 1: return t.text[pick(t.text.size())] + " " + kw("LIKE") + " '%" + std::string(1, static_cast<char>('a' + pick(26))) + "%'";
      case 2: {
        auto a = pick(10);
        return t.num[pick(t.num.size())] + " " + kw("BETWEEN") + " " + std::to_string(a) + " " + kw("AND") + " " +
               std::to_string(a + pick(20));
      }
      case 3: return t.num[pick(t.num.size())] + " " + kw("IS NOT NULL");
      case 4: return kw("NOT") + " (" + t.num[pick(t.num.size())] + " > " + lit() + ")";
      default: return t.num[pick(t.num.size())] + " " + kw("IN") + " (" + lit() + ", " + lit() + ", " + lit() + ")";
    }
  }

  std::string where_clause(const Table& t) {
    if (pick(3) == 0) return "";
    auto w = predicate(t);
    if (pick(2)) w += " " + std::string(pick(2) ? kw("AND") : kw("OR")) + " " + predicate(t);
    return " " + kw("WHERE") + " " + w;
  }

  std::string order_limit(const std::vector<std::string>& cols) {
    std::string out;
    if (pick(2)) {
      out += " " + kw("ORDER BY") + " " + cols[pick(cols.size())] + (pick(2) ? " " + kw("DESC") : "");
      if (pick(2)) out += ", " + cols[pick(cols.size())];
    }
    if (pick(2)) {
      out += " " + kw("LIMIT") + " " + std::to_string(1 + pick(15));
      if (pick(3) == 0) out += " " + kw("OFFSET") + " " + std::to_string(pick(5));
    }
    return out;
  }

  std::string projection() {
    const auto& t = table();
    std::vector<std::string> cols{t.text[pick(t.text.size())]};
    for (std::size_t i = 0, n = 1 + pick(3); i < n; ++i) cols.push_back(t.num[pick(t.num.size())]);
    std::string sel;
    for (std::size_t i = 0; i < cols.size(); ++i) sel += (i ? ", " : "") + cols[i];
    return kw("SELECT") + (pick(5) == 0 ? " " + kw("DISTINCT") : "") + " " + sel + " " + kw("FROM") + " " + t.name +
           where_clause(t) + order_limit(cols);
  }

  std::string aggregate(const Table& t) {
    const char* aggs[] = {"SUM", "AVG", "MIN", "MAX", "COUNT", "TOTAL"};
    auto f = std::string(aggs[pick(6)]);
    if (f == "COUNT" && pick(2)) return kw("COUNT") + "(*)";
    return kw(f.c_str()) + "(" + (f == "COUNT" && pick(2) ? kw("DISTINCT") + " " : "") + t.num[pick(t.num.size())] + ")";
  }

  std::string grouped() {
    const auto& t = table();
    auto g = t.text[pick(t.text.size())];
    auto agg = aggregate(t);
    std::string s = kw("SELECT") + " " + g + ", " + agg + " " + kw("AS") + " agg " + kw("FROM") + " " + t.name +
                    where_clause(t) + " " + kw("GROUP BY") + " " + g;
    if (pick(2)) s += " " + kw("HAVING") + " " + agg + " > " + lit();
    if (pick(2)) s += " " + kw("ORDER BY") + " agg " + kw("DESC") + ", " + g;
    return s;
  }

  std::string scalar_aggregate() {
    const auto& t = table();
    return kw("SELECT") + " " + aggregate(t) + " " + kw("FROM") + " " + t.name + where_clause(t);
  }

  std::string join() {
    std::string s = kw("SELECT") + " p.web_name, t.team_name, p." +
                    std::string(pick(2) ? "goals_scored" : "assists") + " " + kw("FROM") + " players p " +
                    (pick(3) == 0 ? kw("LEFT JOIN") : kw("JOIN")) + " teams t " + kw("ON") +
                    " p.team_id = t.team_id";
    if (pick(2)) s += " " + kw("WHERE") + " t.points > " + lit() + " " + kw("AND") + " p.minutes >= " + lit();
    if (pick(2)) s += " " + kw("ORDER BY") + " p.player_id";
    return s;
  }

  std::string compound() {
    const auto& t = table();
    auto col = t.text[pick(t.text.size())];
    return kw("SELECT") + " " + col + " " + kw("FROM") + " " + t.name + " " + kw("WHERE") + " " + predicate(t) + " " +
           (pick(2) ? kw("UNION ALL") : kw("UNION")) + " " + kw("SELECT") + " " + col + " " + kw("FROM") + " " +
           t.name + " " + kw("WHERE") + " " + predicate(t) + (pick(2) ? " " + kw("ORDER BY") + " 1" : "");
  }

  std::string scalar_subquery() {
    const auto& t = table();
    auto n = t.num[pick(t.num.size())];
    return kw("SELECT") + " " + t.text[0] + ", " + n + " " + kw("FROM") + " " + t.name + " " + kw("WHERE") + " " + n +
           " >= (" + kw("SELECT") + " " + kw("AVG") + "(" + n + ") " + kw("FROM") + " " + t.name + ")";
  }

  std::string in_subquery() {
    return kw("SELECT") + " web_name " + kw("FROM") + " players " + kw("WHERE") + " team_id " +
           (pick(3) == 0 ? kw("NOT") + " " : "") + kw("IN") + " (" + kw("SELECT") + " team_id " + kw("FROM") +
           " teams " + kw("WHERE") + " strength >= " + std::to_string(1 + pick(5)) + ")";
  }

  std::string case_expression() {
    const auto& t = table();
    auto n = t.num[pick(t.num.size())];
    return kw("SELECT") + " " + t.text[0] + ", " + kw("CASE") + " " + kw("WHEN") + " " + n + " > " + lit() + " " +
           kw("THEN") + " 'high' " + kw("ELSE") + " 'low' " + kw("END") + " " + kw("AS") + " band " + kw("FROM") +
           " " + t.name + where_clause(t);
  }

  std::string arithmetic() {
    const auto& t = table();
    auto a = t.num[pick(t.num.size())];
    auto b = t.num[pick(t.num.size())];
    const char* ops[] = {"+", "-", "*"};
    return kw("SELECT") + " " + t.text[0] + ", " + a + " " + ops[pick(3)] + " " + b + " " + kw("AS") + " combo, " +
           kw("ROUND") + "(" + a + " * 1.0 / (" + b + " + 1), 2) " + kw("FROM") + " " + t.name + where_clause(t) +
           order_limit({t.text[0], a});
  }

  std::mt19937_64 rng_;
};

}  // namespace dsqa::oracle
