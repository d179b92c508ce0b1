#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/schema.hpp"
#include "dsqa/value.hpp"

namespace dsqa::sql {

struct Select;
struct Expr;
using ExprPtr = std::shared_ptr<Expr>;
using SelectPtr = std::shared_ptr<Select>;

enum class ExprKind {
  Literal,   // literal
  Column,    // table (optional) + column
  Unary,     // op in {"-", "+", "NOT"}, args[0]
  Binary,    // op, args[0], args[1]
  Function,  // name, args, distinct, star (COUNT(*))
  Case,      // case_operand (optional), whens, else_expr (optional)
  IsNull,    // args[0], negated
  Like,      // args[0] LIKE args[1], negated
  InList,    // args[0] IN (args[1..]), negated
  InSelect,  // args[0] IN (subquery), negated
  Between,   // args[0] BETWEEN args[1] AND args[2], negated
  Subquery,  // scalar subquery
  Exists,    // EXISTS (subquery), negated
};

struct Expr {
  ExprKind kind = ExprKind::Literal;
  Value literal;
  std::string table;
  std::string column;
  std::string op;
  std::string name;  // upper-case function name
  bool distinct = false;
  bool star = false;
  bool negated = false;
  std::vector<ExprPtr> args;
  ExprPtr case_operand;
  std::vector<std::pair<ExprPtr, ExprPtr>> whens;
  ExprPtr else_expr;
  SelectPtr subquery;
};

struct SelectItem {
  ExprPtr expr;        // null when star
  std::string alias;
  bool star = false;
  std::string star_table;  // for `t.*`
};

struct TableRef {
  std::string name;  // catalog table; empty for a subquery
  std::string alias;
  SelectPtr subquery;

  /// Name other clauses use to qualify this source.
  const std::string& exposed_name() const { return alias.empty() ? name : alias; }
};

enum class JoinType { Comma, Inner, Left, Cross };

struct Join {
  JoinType type = JoinType::Inner;
  TableRef right;
  ExprPtr on;
};

struct OrderItem {
  ExprPtr expr;
  bool desc = false;
};

struct SelectCore {
  bool distinct = false;
  std::vector<SelectItem> items;
  std::optional<TableRef> from;
  std::vector<Join> joins;
  ExprPtr where;
  std::vector<ExprPtr> group_by;
  ExprPtr having;
};

struct Select {
  std::vector<SelectCore> cores;       // >= 1; more than one = compound
  std::vector<bool> union_all;         // size cores - 1
  std::vector<OrderItem> order_by;
  ExprPtr limit;
  ExprPtr offset;
};

// ------------------------------------------------------------ construction

ExprPtr make_literal(Value v);
ExprPtr make_column(std::string column, std::string table = "");
ExprPtr make_unary(std::string op, ExprPtr operand);
ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_function(std::string name, std::vector<ExprPtr> args, bool distinct = false);
ExprPtr make_count_star();

// ------------------------------------------------------------ parse / render

/// Parses exactly one SELECT statement (trailing semicolon tolerated).
/// Errors: Error(Syntax) with position and token; Error(ReadOnly) for write
/// or DDL verbs; Error(MultipleStatements); Error(Unsupported) for CTEs and
/// other constructs outside the dialect.
SelectPtr parse(std::string_view text);

/// Single-line normalized SQL: upper-case keywords, minimal parentheses,
/// single spaces. parse(render(a)) renders identically to render(a).
std::string render(const Select& select);
std::string render(const Expr& expr);

bool is_aggregate_function(std::string_view upper_name);

// ------------------------------------------------------------ analysis

enum class Primitive { Calculate, Compare, Filter, Order, Manipulate, Retrieve };
inline constexpr Primitive kAllPrimitives[] = {Primitive::Calculate, Primitive::Compare, Primitive::Filter,
                                               Primitive::Order, Primitive::Manipulate, Primitive::Retrieve};

std::string_view to_string(Primitive p);
Primitive primitive_from_string(std::string_view name);

using PrimitiveSet = std::set<Primitive>;

std::vector<std::string> primitive_names(const PrimitiveSet& set);
PrimitiveSet primitives_from_names(const std::vector<std::string>& names);

/// Every catalog table named in FROM/JOIN anywhere in the statement.
std::set<std::string> referenced_tables(const Select& select);
/// The ephemeral subset of referenced_tables.
std::set<std::string> detect_dependent_tables(const Select& select);
/// Deterministic primitive tags (rules documented in docs/sql_dialect.md).
PrimitiveSet tag_primitives(const Select& select);

struct ValidatedSql {
  std::string text;  // normalized
  SelectPtr ast;
  std::set<std::string> referenced_tables;
  std::set<std::string> dependent_tables;
  PrimitiveSet primitives;
  std::vector<std::string> output_columns;
};

/// Parses and checks the statement against the catalog. Unknown identifiers
/// raise Error(UnknownIdentifier) whose detail lists edit-distance candidates.
ValidatedSql validate_sql(std::string_view text, const SchemaCatalog& catalog);

/// Semantic checks on an already-built AST (used by validate_sql and fuzzers).
ValidatedSql validate_ast(SelectPtr ast, const SchemaCatalog& catalog);

}  // namespace dsqa::sql
