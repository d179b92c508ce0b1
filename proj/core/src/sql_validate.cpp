#include <algorithm>
#include <functional>
#include <map>

#include "dsqa/error.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/text.hpp"

namespace dsqa::sql {

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::Calculate: return "Calculate";
    case Primitive::Compare: return "Compare";
    case Primitive::Filter: return "Filter";
    case Primitive::Order: return "Order";
    case Primitive::Manipulate: return "Manipulate";
    case Primitive::Retrieve: return "Retrieve";
  }
  return "?";
}

Primitive primitive_from_string(std::string_view name) {
  for (auto p : kAllPrimitives)
    if (iequals(to_string(p), name)) return p;
  throw Error(ErrorCode::Parse, "unknown primitive '" + std::string(name) + "'");
}

std::vector<std::string> primitive_names(const PrimitiveSet& set) {
  std::vector<std::string> out;
  for (auto p : set) out.emplace_back(to_string(p));
  return out;
}

PrimitiveSet primitives_from_names(const std::vector<std::string>& names) {
  PrimitiveSet out;
  for (const auto& n : names) out.insert(primitive_from_string(n));
  return out;
}

namespace {

// ------------------------------------------------------------ AST walking

void walk_select(const Select& s, const std::function<void(const Select&)>& on_select);

void walk_expr_selects(const Expr& e, const std::function<void(const Select&)>& on_select) {
  for (const auto& a : e.args)
    if (a) walk_expr_selects(*a, on_select);
  if (e.case_operand) walk_expr_selects(*e.case_operand, on_select);
  for (const auto& [w, t] : e.whens) {
    walk_expr_selects(*w, on_select);
    walk_expr_selects(*t, on_select);
  }
  if (e.else_expr) walk_expr_selects(*e.else_expr, on_select);
  if (e.subquery) walk_select(*e.subquery, on_select);
}

void for_each_expr(const Select& s, const std::function<void(const ExprPtr&)>& fn) {
  for (const auto& c : s.cores) {
    for (const auto& i : c.items)
      if (i.expr) fn(i.expr);
    for (const auto& j : c.joins)
      if (j.on) fn(j.on);
    if (c.where) fn(c.where);
    for (const auto& g : c.group_by) fn(g);
    if (c.having) fn(c.having);
  }
  for (const auto& o : s.order_by) fn(o.expr);
  if (s.limit) fn(s.limit);
  if (s.offset) fn(s.offset);
}

void walk_select(const Select& s, const std::function<void(const Select&)>& on_select) {
  on_select(s);
  for (const auto& c : s.cores) {
    if (c.from && c.from->subquery) walk_select(*c.from->subquery, on_select);
    for (const auto& j : c.joins)
      if (j.right.subquery) walk_select(*j.right.subquery, on_select);
  }
  for_each_expr(s, [&](const ExprPtr& e) { walk_expr_selects(*e, on_select); });
}

bool is_comparison(const std::string& op) {
  return op == "=" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

bool is_arithmetic(const std::string& op) { return op == "+" || op == "-" || op == "*" || op == "/" || op == "%"; }

// Constant = no column references, aggregates or subqueries.
bool is_constant(const Expr& e) {
  if (e.kind == ExprKind::Column || e.subquery) return false;
  if (e.kind == ExprKind::Function && (e.star || is_aggregate_function(e.name))) return false;
  for (const auto& a : e.args)
    if (a && !is_constant(*a)) return false;
  if (e.case_operand && !is_constant(*e.case_operand)) return false;
  for (const auto& [w, t] : e.whens)
    if (!is_constant(*w) || !is_constant(*t)) return false;
  if (e.else_expr && !is_constant(*e.else_expr)) return false;
  return true;
}

void visit_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& a : e.args)
    if (a) visit_expr(*a, fn);
  if (e.case_operand) visit_expr(*e.case_operand, fn);
  for (const auto& [w, t] : e.whens) {
    visit_expr(*w, fn);
    visit_expr(*t, fn);
  }
  if (e.else_expr) visit_expr(*e.else_expr, fn);
  // Subqueries are visited as selects of their own by walk_select.
}

// ------------------------------------------------------------ validation

struct Source {
  std::string exposed;
  std::string table;  // catalog name, empty for subqueries
  std::vector<std::string> columns;
};

enum class Clause { SelectList, Where, JoinOn, GroupBy, Having, OrderBy, Limit };

struct Scope {
  std::vector<Source> sources;
  const Scope* parent = nullptr;
  // Select-list aliases with whether their expression aggregates.
  std::vector<std::pair<std::string, bool>> aliases;
};

const std::map<std::string, std::pair<int, int>>& function_arity() {
  static const std::map<std::string, std::pair<int, int>> k = {
      {"COUNT", {1, 1}},  {"SUM", {1, 1}},    {"AVG", {1, 1}},     {"MIN", {1, 8}},    {"MAX", {1, 8}},
      {"TOTAL", {1, 1}},  {"LOWER", {1, 1}},  {"UPPER", {1, 1}},   {"LENGTH", {1, 1}}, {"ABS", {1, 1}},
      {"ROUND", {1, 2}},  {"COALESCE", {2, 8}}, {"IFNULL", {2, 2}}, {"NULLIF", {2, 2}}, {"SUBSTR", {2, 3}},
      {"TRIM", {1, 2}},   {"REPLACE", {3, 3}}, {"INSTR", {2, 2}}};
  return k;
}

std::string suggestions(std::string_view name, const std::vector<std::string>& pool) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  auto target = ascii_lower(name);
  std::size_t limit = std::max<std::size_t>(2, target.size() / 3);
  for (const auto& p : pool) {
    auto d = edit_distance(target, ascii_lower(p));
    if (d <= limit) scored.emplace_back(d, p);
  }
  std::sort(scored.begin(), scored.end());
  scored.erase(std::unique(scored.begin(), scored.end()), scored.end());
  std::string out;
  for (std::size_t i = 0; i < scored.size() && i < 3; ++i) out += (i ? ", " : "") + scored[i].second;
  return out;
}

[[noreturn]] void unknown(const std::string& what, const std::string& name, const std::vector<std::string>& pool) {
  auto cands = suggestions(name, pool);
  std::string msg = "unknown " + what + " '" + name + "'";
  if (!cands.empty()) msg += "; did you mean " + cands + "?";
  throw Error(ErrorCode::UnknownIdentifier, msg, cands);
}

[[noreturn]] void semantic(const std::string& what) { throw Error(ErrorCode::Syntax, "invalid SQL: " + what); }

bool is_aggregate_call(const Expr& e) {
  if (e.kind != ExprKind::Function) return false;
  if (e.star) return true;
  if (e.name == "MIN" || e.name == "MAX") return e.args.size() == 1;
  return is_aggregate_function(e.name);
}

bool contains_aggregate(const Expr& e) {
  bool found = false;
  visit_expr(e, [&](const Expr& x) { found = found || is_aggregate_call(x); });
  return found;
}

class Validator {
 public:
  explicit Validator(const SchemaCatalog& catalog) : catalog_(catalog) {
    for (const auto& t : catalog.tables) table_names_.push_back(t.name);
  }

  // Returns output column names.
  std::vector<std::string> select(Select& s, const Scope* outer) {
    std::vector<std::string> first_names;
    std::vector<Scope> scopes;
    for (std::size_t i = 0; i < s.cores.size(); ++i) {
      scopes.emplace_back();
      auto names = core(s.cores[i], outer, scopes.back());
      if (i == 0) {
        first_names = names;
      } else if (names.size() != first_names.size()) {
        semantic("SELECTs to the left and right of UNION do not have the same number of result columns");
      }
    }
    bool compound = s.cores.size() > 1;
    for (auto& o : s.order_by) {
      if (auto pos = integer_literal(*o.expr)) {
        if (*pos < 1 || *pos > static_cast<std::int64_t>(first_names.size()))
          semantic("ORDER BY term out of range - should be between 1 and " + std::to_string(first_names.size()));
        continue;
      }
      if (compound) {
        if (o.expr->kind != ExprKind::Column || !o.expr->table.empty() ||
            std::none_of(first_names.begin(), first_names.end(),
                         [&](const std::string& n) { return iequals(n, o.expr->column); }))
          semantic("ORDER BY term does not match any column in the result set");
        continue;
      }
      expr(*o.expr, scopes.front(), Clause::OrderBy, false);
    }
    for (auto* lim : {&s.limit, &s.offset}) {
      if (!*lim) continue;
      if (!integer_literal(**lim))
        throw Error(ErrorCode::Unsupported, "unsupported SQL: LIMIT and OFFSET take integer literals");
    }
    return first_names;
  }

 private:
  static std::optional<std::int64_t> integer_literal(const Expr& e) {
    if (e.kind != ExprKind::Literal) return std::nullopt;
    if (const auto* v = std::get_if<std::int64_t>(&e.literal)) return *v;
    return std::nullopt;
  }

  Source source_for(TableRef& ref) {
    Source src;
    if (ref.subquery) {
      src.columns = select(*ref.subquery, nullptr);
      src.exposed = ref.alias;
      return src;
    }
    const TableDef* def = nullptr;
    for (const auto& t : catalog_.tables)
      if (iequals(t.name, ref.name)) def = &t;
    if (!def) unknown("table", ref.name, table_names_);
    ref.name = def->name;
    src.table = def->name;
    src.exposed = ref.exposed_name();
    for (const auto& c : def->columns) src.columns.push_back(c.name);
    return src;
  }

  void add_source(Scope& scope, Source src) {
    if (!src.exposed.empty())
      for (const auto& s : scope.sources)
        if (iequals(s.exposed, src.exposed)) semantic("duplicate table name or alias '" + src.exposed + "'");
    scope.sources.push_back(std::move(src));
  }

  std::vector<std::string> core(SelectCore& c, const Scope* outer, Scope& scope) {
    scope.parent = outer;
    if (c.from) {
      add_source(scope, source_for(*c.from));
      for (auto& j : c.joins) {
        add_source(scope, source_for(j.right));
        if (j.on) expr(*j.on, scope, Clause::JoinOn, false);
      }
    }
    std::vector<std::string> names;
    std::vector<bool> item_aggregates;
    for (auto& item : c.items) {
      if (item.star) {
        if (scope.sources.empty()) semantic("no tables specified");
        bool matched = false;
        for (const auto& src : scope.sources) {
          if (!item.star_table.empty() && !iequals(src.exposed, item.star_table)) continue;
          matched = true;
          for (const auto& col : src.columns) {
            names.push_back(col);
            item_aggregates.push_back(false);
          }
        }
        if (!matched) {
          std::vector<std::string> pool;
          for (const auto& src : scope.sources) pool.push_back(src.exposed);
          unknown("table or alias", item.star_table, pool);
        }
        continue;
      }
      expr(*item.expr, scope, Clause::SelectList, false);
      bool agg = contains_aggregate(*item.expr);
      item_aggregates.push_back(agg);
      if (!item.alias.empty()) {
        names.push_back(item.alias);
        scope.aliases.emplace_back(item.alias, agg);
      } else if (item.expr->kind == ExprKind::Column) {
        names.push_back(item.expr->column);
      } else {
        names.push_back(render(*item.expr));
      }
    }
    if (c.where) expr(*c.where, scope, Clause::Where, false);
    for (auto& g : c.group_by) {
      if (auto pos = integer_literal(*g)) {
        if (*pos < 1 || *pos > static_cast<std::int64_t>(names.size()))
          semantic("GROUP BY term out of range - should be between 1 and " + std::to_string(names.size()));
        if (item_aggregates[static_cast<std::size_t>(*pos - 1)])
          semantic("aggregate functions are not allowed in the GROUP BY clause");
        continue;
      }
      expr(*g, scope, Clause::GroupBy, false);
    }
    if (c.having) {
      if (c.group_by.empty()) semantic("a GROUP BY clause is required before HAVING");
      expr(*c.having, scope, Clause::Having, false);
    }
    return names;
  }

  bool aliases_visible(Clause clause) const {
    return clause == Clause::OrderBy || clause == Clause::GroupBy || clause == Clause::Having;
  }

  void column(Expr& e, const Scope& scope, Clause clause) {
    if (!e.table.empty()) {
      for (const Scope* s = &scope; s; s = s->parent) {
        for (const auto& src : s->sources) {
          if (!iequals(src.exposed, e.table)) continue;
          for (const auto& col : src.columns) {
            if (iequals(col, e.column)) {
              e.column = col;
              if (!src.table.empty() && iequals(src.exposed, src.table)) e.table = src.table;
              return;
            }
          }
          unknown("column", e.table + "." + e.column, src.columns);
        }
      }
      std::vector<std::string> pool;
      for (const Scope* s = &scope; s; s = s->parent)
        for (const auto& src : s->sources) pool.push_back(src.exposed);
      unknown("table or alias", e.table, pool);
    }
    for (const Scope* s = &scope; s; s = s->parent) {
      int hits = 0;
      std::string canonical;
      for (const auto& src : s->sources)
        for (const auto& col : src.columns)
          if (iequals(col, e.column)) {
            ++hits;
            canonical = col;
          }
      if (hits > 1) {
        // Select-list aliases shadow ambiguous inputs where they are visible.
        if (s == &scope && aliases_visible(clause))
          for (const auto& [alias, agg] : s->aliases)
            if (iequals(alias, e.column)) return check_alias(agg, clause);
        throw Error(ErrorCode::UnknownIdentifier, "ambiguous column name '" + e.column + "'", e.column);
      }
      if (hits == 1) {
        e.column = canonical;
        return;
      }
      if (s == &scope && aliases_visible(clause))
        for (const auto& [alias, agg] : s->aliases)
          if (iequals(alias, e.column)) return check_alias(agg, clause);
    }
    std::vector<std::string> pool;
    for (const Scope* s = &scope; s; s = s->parent) {
      for (const auto& src : s->sources) pool.insert(pool.end(), src.columns.begin(), src.columns.end());
      for (const auto& a : s->aliases) pool.push_back(a.first);
    }
    if (pool.empty())
      for (const auto& t : catalog_.tables)
        for (const auto& c : t.columns) pool.push_back(c.name);
    unknown("column", e.column, pool);
  }

  static void check_alias(bool aggregate_alias, Clause clause) {
    if (aggregate_alias && clause == Clause::GroupBy)
      semantic("aggregate functions are not allowed in the GROUP BY clause");
  }

  void subquery(Select& s, const Scope& scope, bool single_column) {
    auto names = select(s, &scope);
    if (single_column && names.size() != 1)
      semantic("sub-select returns " + std::to_string(names.size()) + " columns - expected 1");
  }

  void expr(Expr& e, const Scope& scope, Clause clause, bool in_aggregate) {
    switch (e.kind) {
      case ExprKind::Literal: return;
      case ExprKind::Column:
        if (clause == Clause::Limit) semantic("column references are not allowed in LIMIT");
        return column(e, scope, clause);
      case ExprKind::Function: {
        auto it = function_arity().find(e.name);
        if (it == function_arity().end()) {
          std::vector<std::string> pool;
          for (const auto& [n, _] : function_arity()) pool.push_back(n);
          unknown("function", e.name, pool);
        }
        bool agg = is_aggregate_call(e);
        if (e.star && e.name != "COUNT") semantic(e.name + "(*) is not allowed");
        int argc = static_cast<int>(e.args.size());
        if (!e.star && (argc < it->second.first || argc > it->second.second))
          semantic("wrong number of arguments to function " + e.name + "()");
        if (e.distinct && (!agg || argc != 1)) semantic("DISTINCT is only allowed in single-argument aggregates");
        if (agg) {
          if (in_aggregate) semantic("nested aggregate function " + e.name + "()");
          if (clause == Clause::Where) semantic("aggregate functions are not allowed in WHERE");
          if (clause == Clause::JoinOn) semantic("aggregate functions are not allowed in ON");
          if (clause == Clause::GroupBy) semantic("aggregate functions are not allowed in the GROUP BY clause");
          if (clause == Clause::Limit) semantic("aggregate functions are not allowed in LIMIT");
        }
        for (auto& a : e.args) expr(*a, scope, clause, in_aggregate || agg);
        return;
      }
      case ExprKind::Case:
        if (e.case_operand) expr(*e.case_operand, scope, clause, in_aggregate);
        for (auto& [w, t] : e.whens) {
          expr(*w, scope, clause, in_aggregate);
          expr(*t, scope, clause, in_aggregate);
        }
        if (e.else_expr) expr(*e.else_expr, scope, clause, in_aggregate);
        return;
      case ExprKind::InSelect:
        expr(*e.args[0], scope, clause, in_aggregate);
        return subquery(*e.subquery, scope, true);
      case ExprKind::Subquery: return subquery(*e.subquery, scope, true);
      case ExprKind::Exists: return subquery(*e.subquery, scope, false);
      case ExprKind::Unary:
      case ExprKind::Binary:
      case ExprKind::IsNull:
      case ExprKind::Like:
      case ExprKind::InList:
      case ExprKind::Between:
        for (auto& a : e.args) expr(*a, scope, clause, in_aggregate);
        return;
    }
  }

  const SchemaCatalog& catalog_;
  std::vector<std::string> table_names_;
};

}  // namespace

std::set<std::string> referenced_tables(const Select& select) {
  std::set<std::string> out;
  walk_select(select, [&](const Select& s) {
    for (const auto& c : s.cores) {
      if (c.from && !c.from->subquery) out.insert(c.from->name);
      for (const auto& j : c.joins)
        if (!j.right.subquery) out.insert(j.right.name);
    }
  });
  return out;
}

std::set<std::string> detect_dependent_tables(const Select& select) {
  std::set<std::string> out;
  for (const auto& t : referenced_tables(select))
    if (is_ephemeral_table(ascii_lower(t))) out.insert(ascii_lower(t));
  return out;
}

PrimitiveSet tag_primitives(const Select& select) {
  PrimitiveSet out{Primitive::Retrieve};
  auto scan = [&](const Expr& root, bool filter_context, bool compare_allowed) {
    visit_expr(root, [&](const Expr& e) {
      if (is_aggregate_call(e)) out.insert(Primitive::Calculate);
      if (e.kind == ExprKind::Function && (e.name == "ABS" || e.name == "ROUND")) out.insert(Primitive::Calculate);
      if (e.kind == ExprKind::Binary && is_arithmetic(e.op)) out.insert(Primitive::Calculate);
      if (e.kind == ExprKind::Unary && e.op == "-" && !is_constant(*e.args[0])) out.insert(Primitive::Calculate);

      bool literal_side = false, both_sides = false;
      switch (e.kind) {
        case ExprKind::Binary:
          if (!is_comparison(e.op)) break;
          {
            bool l = is_constant(*e.args[0]), r = is_constant(*e.args[1]);
            literal_side = l != r;
            both_sides = !l && !r;
          }
          break;
        case ExprKind::Like:
          literal_side = !is_constant(*e.args[0]) && is_constant(*e.args[1]);
          both_sides = !is_constant(*e.args[0]) && !is_constant(*e.args[1]);
          break;
        case ExprKind::InList: {
          bool items_const = std::all_of(e.args.begin() + 1, e.args.end(), [](const ExprPtr& a) { return is_constant(*a); });
          literal_side = !is_constant(*e.args[0]) && items_const;
          both_sides = !is_constant(*e.args[0]) && !items_const;
          break;
        }
        case ExprKind::Between: {
          bool bounds_const = is_constant(*e.args[1]) && is_constant(*e.args[2]);
          literal_side = !is_constant(*e.args[0]) && bounds_const;
          both_sides = !is_constant(*e.args[0]) && !bounds_const;
          break;
        }
        case ExprKind::IsNull: literal_side = !is_constant(*e.args[0]); break;
        case ExprKind::InSelect: both_sides = true; break;
        default: break;
      }
      if (literal_side && filter_context) out.insert(Primitive::Filter);
      if (both_sides && compare_allowed) out.insert(Primitive::Compare);
    });
  };
  walk_select(select, [&](const Select& s) {
    if (s.cores.size() > 1) out.insert(Primitive::Manipulate);
    if (!s.order_by.empty()) out.insert(Primitive::Order);
    for (const auto& c : s.cores) {
      if (!c.joins.empty()) out.insert(Primitive::Manipulate);
      for (const auto& i : c.items)
        if (i.expr) scan(*i.expr, false, true);
      for (const auto& j : c.joins)
        if (j.on) scan(*j.on, false, false);
      if (c.where) scan(*c.where, true, true);
      for (const auto& g : c.group_by) scan(*g, false, true);
      if (c.having) scan(*c.having, true, true);
    }
    for (const auto& o : s.order_by) scan(*o.expr, false, true);
  });
  return out;
}

ValidatedSql validate_ast(SelectPtr ast, const SchemaCatalog& catalog) {
  ValidatedSql out;
  out.output_columns = Validator(catalog).select(*ast, nullptr);
  out.text = render(*ast);
  out.referenced_tables = referenced_tables(*ast);
  out.dependent_tables = detect_dependent_tables(*ast);
  out.primitives = tag_primitives(*ast);
  out.ast = std::move(ast);
  return out;
}

ValidatedSql validate_sql(std::string_view text, const SchemaCatalog& catalog) {
  return validate_ast(parse(text), catalog);
}

}  // namespace dsqa::sql
