#include <cctype>
#include <cmath>
#include <set>

#include "dsqa/error.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/text.hpp"

namespace dsqa::sql {

ExprPtr make_literal(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Literal;
  e->literal = std::move(v);
  return e;
}

ExprPtr make_column(std::string column, std::string table) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Column;
  e->column = std::move(column);
  e->table = std::move(table);
  return e;
}

ExprPtr make_unary(std::string op, ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->op = std::move(op);
  e->args = {std::move(operand)};
  return e;
}

ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->op = std::move(op);
  e->args = {std::move(lhs), std::move(rhs)};
  return e;
}

ExprPtr make_function(std::string name, std::vector<ExprPtr> args, bool distinct) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Function;
  e->name = ascii_upper(name);
  e->args = std::move(args);
  e->distinct = distinct;
  return e;
}

ExprPtr make_count_star() {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Function;
  e->name = "COUNT";
  e->star = true;
  return e;
}

bool is_aggregate_function(std::string_view upper_name) {
  return upper_name == "COUNT" || upper_name == "SUM" || upper_name == "AVG" || upper_name == "MIN" ||
         upper_name == "MAX" || upper_name == "TOTAL";
}

namespace {

// Precedence levels, low to high.
constexpr int kOr = 1, kAnd = 2, kNot = 3, kEquality = 4, kRelational = 5, kAdditive = 6, kMultiplicative = 7,
              kConcat = 8, kUnary = 9, kPrimary = 10;

int binary_precedence(const std::string& op) {
  if (op == "OR") return kOr;
  if (op == "AND") return kAnd;
  if (op == "=" || op == "!=") return kEquality;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return kRelational;
  if (op == "+" || op == "-") return kAdditive;
  if (op == "*" || op == "/" || op == "%") return kMultiplicative;
  if (op == "||") return kConcat;
  throw Error(ErrorCode::Render, "unknown binary operator '" + op + "'");
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary: return binary_precedence(e.op);
    case ExprKind::Unary: return e.op == "NOT" ? kNot : kUnary;
    case ExprKind::IsNull:
    case ExprKind::Like:
    case ExprKind::InList:
    case ExprKind::InSelect:
    case ExprKind::Between: return kEquality;
    case ExprKind::Exists: return e.negated ? kNot : kPrimary;
    case ExprKind::Literal: {
      // A negative number re-parses as a folded literal, but in operand
      // position it must not glue to a preceding '-'.
      return kPrimary;
    }
    default: return kPrimary;
  }
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "ALL",    "AND",     "AS",     "ASC",    "BETWEEN", "BY",     "CASE",   "CAST",      "COLLATE", "CROSS",
      "DESC",   "DISTINCT", "ELSE",  "END",    "ESCAPE",  "EXCEPT", "EXISTS", "FALSE",     "FROM",    "FULL",
      "GLOB",   "GROUP",   "HAVING", "IN",     "INNER",   "INTERSECT", "IS",  "ISNULL",    "JOIN",    "LEFT",
      "LIKE",   "LIMIT",   "MATCH",  "NATURAL", "NOT",    "NOTNULL", "NULL",  "OFFSET",    "ON",      "OR",
      "ORDER",  "OUTER",   "OVER",   "REGEXP", "RIGHT",   "SELECT", "THEN",   "TRUE",      "UNION",   "USING",
      "VALUES", "WHEN",    "WHERE",  "WINDOW", "WITH",    "INSERT", "UPDATE", "DELETE",    "CREATE",  "DROP",
      "ALTER",  "ATTACH",  "DETACH", "REPLACE", "PRAGMA", "TABLE",  "INDEX",  "VIEW",      "TRIGGER", "BEGIN",
      "COMMIT", "ROLLBACK", "DEFAULT", "PRIMARY", "KEY",  "REFERENCES", "UNIQUE", "CHECK", "CONSTRAINT", "INTO",
      "SET",    "ANALYZE", "VACUUM", "REINDEX", "SAVEPOINT", "RELEASE"};
  return k;
}

std::string ident(const std::string& name) {
  bool bare = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) bare = false;
  if (bare && !keywords().count(ascii_upper(name))) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string literal_text(const Value& v) {
  switch (v.index()) {
    case 0: return "NULL";
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: {
      double d = std::get<double>(v);
      if (!std::isfinite(d)) throw Error(ErrorCode::Render, "non-finite literal cannot be rendered");
      return render_real(d);
    }
    case 3: {
      std::string out = "'";
      for (char c : std::get<std::string>(v)) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
    case 4: return std::get<bool>(v) ? "TRUE" : "FALSE";
  }
  return "NULL";
}

class Renderer {
 public:
  std::string select(const Select& s) {
    std::string out;
    for (std::size_t i = 0; i < s.cores.size(); ++i) {
      if (i > 0) out += s.union_all[i - 1] ? " UNION ALL " : " UNION ";
      out += core(s.cores[i]);
    }
    if (!s.order_by.empty()) {
      out += " ORDER BY ";
      for (std::size_t i = 0; i < s.order_by.size(); ++i) {
        if (i) out += ", ";
        out += expr(*s.order_by[i].expr, 0);
        if (s.order_by[i].desc) out += " DESC";
      }
    }
    if (s.limit) out += " LIMIT " + expr(*s.limit, 0);
    if (s.offset) {
      if (!s.limit) out += " LIMIT -1";
      out += " OFFSET " + expr(*s.offset, 0);
    }
    return out;
  }

  std::string expr(const Expr& e, int min_prec) {
    std::string text = expr_inner(e);
    if (precedence(e) < min_prec) return "(" + text + ")";
    return text;
  }

 private:
  std::string core(const SelectCore& c) {
    std::string out = c.distinct ? "SELECT DISTINCT " : "SELECT ";
    for (std::size_t i = 0; i < c.items.size(); ++i) {
      if (i) out += ", ";
      const auto& item = c.items[i];
      if (item.star) {
        out += item.star_table.empty() ? "*" : ident(item.star_table) + ".*";
        continue;
      }
      out += expr(*item.expr, 0);
      if (!item.alias.empty()) out += " AS " + ident(item.alias);
    }
    if (c.from) {
      out += " FROM " + table_ref(*c.from);
      for (const auto& j : c.joins) {
        switch (j.type) {
          case JoinType::Comma: out += ", "; break;
          case JoinType::Inner: out += " JOIN "; break;
          case JoinType::Left: out += " LEFT JOIN "; break;
          case JoinType::Cross: out += " CROSS JOIN "; break;
        }
        out += table_ref(j.right);
        if (j.on) out += " ON " + expr(*j.on, 0);
      }
    }
    if (c.where) out += " WHERE " + expr(*c.where, 0);
    if (!c.group_by.empty()) {
      out += " GROUP BY ";
      for (std::size_t i = 0; i < c.group_by.size(); ++i) out += (i ? ", " : "") + expr(*c.group_by[i], 0);
    }
    if (c.having) out += " HAVING " + expr(*c.having, 0);
    return out;
  }

  std::string table_ref(const TableRef& t) {
    std::string out = t.subquery ? "(" + select(*t.subquery) + ")" : ident(t.name);
    if (!t.alias.empty()) out += " AS " + ident(t.alias);
    return out;
  }

  std::string expr_inner(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Literal: return literal_text(e.literal);
      case ExprKind::Column: return e.table.empty() ? ident(e.column) : ident(e.table) + "." + ident(e.column);
      case ExprKind::Unary: {
        if (e.op == "NOT") return "NOT " + expr(*e.args[0], kNot);
        auto operand = expr(*e.args[0], kUnary);
        // Keep "--" from starting a comment and keep the unary node distinct
        // from a folded negative literal.
        if (!operand.empty() && (operand[0] == '-' || operand[0] == '+')) operand = "(" + operand + ")";
        if (e.args[0]->kind == ExprKind::Literal && operand[0] != '(') operand = "(" + operand + ")";
        return e.op + operand;
      }
      case ExprKind::Binary: {
        int p = binary_precedence(e.op);
        auto lhs = expr(*e.args[0], p);
        auto rhs = expr(*e.args[1], p + 1);
        return lhs + " " + e.op + " " + rhs;
      }
      case ExprKind::Function: {
        std::string out = e.name + "(";
        if (e.star) return out + "*)";
        if (e.distinct) out += "DISTINCT ";
        for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + expr(*e.args[i], 0);
        return out + ")";
      }
      case ExprKind::Case: {
        std::string out = "CASE";
        if (e.case_operand) out += " " + expr(*e.case_operand, 0);
        for (const auto& [w, t] : e.whens) out += " WHEN " + expr(*w, 0) + " THEN " + expr(*t, 0);
        if (e.else_expr) out += " ELSE " + expr(*e.else_expr, 0);
        return out + " END";
      }
      case ExprKind::IsNull:
        return expr(*e.args[0], kEquality) + (e.negated ? " IS NOT NULL" : " IS NULL");
      case ExprKind::Like:
        return expr(*e.args[0], kEquality) + (e.negated ? " NOT LIKE " : " LIKE ") + expr(*e.args[1], kRelational);
      case ExprKind::InList: {
        std::string out = expr(*e.args[0], kEquality) + (e.negated ? " NOT IN (" : " IN (");
        for (std::size_t i = 1; i < e.args.size(); ++i) out += (i > 1 ? ", " : "") + expr(*e.args[i], 0);
        return out + ")";
      }
      case ExprKind::InSelect:
        return expr(*e.args[0], kEquality) + (e.negated ? " NOT IN (" : " IN (") + select(*e.subquery) + ")";
      case ExprKind::Between:
        return expr(*e.args[0], kEquality) + (e.negated ? " NOT BETWEEN " : " BETWEEN ") +
               expr(*e.args[1], kRelational) + " AND " + expr(*e.args[2], kRelational);
      case ExprKind::Subquery: return "(" + select(*e.subquery) + ")";
      case ExprKind::Exists: return std::string(e.negated ? "NOT EXISTS (" : "EXISTS (") + select(*e.subquery) + ")";
    }
    return {};
  }
};

}  // namespace

std::string render(const Select& select) { return Renderer().select(select); }
std::string render(const Expr& expr) { return Renderer().expr(expr, 0); }

}  // namespace dsqa::sql
