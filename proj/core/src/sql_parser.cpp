#include <cctype>
#include <charconv>
#include <set>

#include "dsqa/error.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/text.hpp"

namespace dsqa::sql {

namespace {

enum class Tok { Ident, QuotedIdent, String, Integer, Real, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;   // raw (unquoted for strings/quoted identifiers)
  std::string upper;  // upper-case text for identifiers
  std::size_t pos = 0;
};

const std::set<std::string>& write_verbs() {
  static const std::set<std::string> k = {"INSERT", "UPDATE", "DELETE", "CREATE", "ALTER", "DROP",
                                          "ATTACH", "DETACH", "REPLACE", "PRAGMA", "VACUUM", "REINDEX",
                                          "ANALYZE", "BEGIN", "COMMIT", "ROLLBACK", "SAVEPOINT", "RELEASE",
                                          "TRUNCATE", "GRANT", "REVOKE", "UPSERT", "MERGE", "END"};
  return k;
}

// Words that cannot be used as bare aliases.
const std::set<std::string>& reserved() {
  static const std::set<std::string> k = {
      "SELECT", "DISTINCT", "ALL",   "FROM",    "WHERE",  "GROUP", "BY",      "HAVING", "ORDER",  "ASC",
      "DESC",   "LIMIT",    "OFFSET", "UNION",  "INTERSECT", "EXCEPT", "JOIN", "INNER", "LEFT",  "RIGHT",
      "FULL",   "OUTER",    "CROSS", "NATURAL", "ON",     "USING", "AS",      "AND",    "OR",     "NOT",
      "NULL",   "IS",       "IN",    "LIKE",    "GLOB",   "BETWEEN", "CASE",  "WHEN",   "THEN",   "ELSE",
      "END",    "EXISTS",   "TRUE",  "FALSE",   "WITH",   "ESCAPE", "COLLATE", "CAST",  "WINDOW", "OVER",
      "REGEXP", "MATCH",    "ISNULL", "NOTNULL", "VALUES"};
  return k;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= src_.size()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = Tok::End;
    end.pos = src_.size();
    out.push_back(end);
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t pos) const {
    throw Error(ErrorCode::Syntax, "syntax error at position " + std::to_string(pos + 1) + ": " + what,
                std::to_string(pos + 1));
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
        while (i_ < src_.size() && src_[i_] != '\n') ++i_;
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '*') {
        auto close = src_.find("*/", i_ + 2);
        if (close == std::string_view::npos) fail("unterminated comment", i_);
        i_ = close + 2;
      } else {
        break;
      }
    }
  }

  Token next() {
    Token t;
    t.pos = i_;
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t s = i_;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' || src_[i_] == '$'))
        ++i_;
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(s, i_ - s));
      t.upper = ascii_upper(t.text);
      return t;
    }
    if (c == '"' || c == '`' || c == '[') {
      char close = c == '[' ? ']' : c;
      std::string body;
      ++i_;
      while (true) {
        if (i_ >= src_.size()) fail("unterminated quoted identifier", t.pos);
        if (src_[i_] == close) {
          if (close != ']' && i_ + 1 < src_.size() && src_[i_ + 1] == close) {
            body += close;
            i_ += 2;
            continue;
          }
          ++i_;
          break;
        }
        body += src_[i_++];
      }
      t.kind = Tok::QuotedIdent;
      t.text = body;
      t.upper = ascii_upper(body);
      return t;
    }
    if (c == '\'') {
      std::string body;
      ++i_;
      while (true) {
        if (i_ >= src_.size()) fail("unterminated string literal", t.pos);
        if (src_[i_] == '\'') {
          if (i_ + 1 < src_.size() && src_[i_ + 1] == '\'') {
            body += '\'';
            i_ += 2;
            continue;
          }
          ++i_;
          break;
        }
        body += src_[i_++];
      }
      t.kind = Tok::String;
      t.text = body;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      std::size_t s = i_;
      bool real = false;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      if (i_ < src_.size() && src_[i_] == '.') {
        real = true;
        ++i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      }
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        std::size_t save = i_;
        ++i_;
        if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
        if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          real = true;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        } else {
          i_ = save;
        }
      }
      if (i_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        fail("malformed number", s);
      t.kind = real ? Tok::Real : Tok::Integer;
      t.text = std::string(src_.substr(s, i_ - s));
      return t;
    }
    static const char* kTwo[] = {"||", "==", "!=", "<>", "<=", ">="};
    for (const char* op : kTwo) {
      if (src_.substr(i_, 2) == op) {
        t.kind = Tok::Punct;
        t.text = op;
        i_ += 2;
        return t;
      }
    }
    static const std::string_view kOne = "(),.;*+-/%=<>";
    if (kOne.find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      ++i_;
      return t;
    }
    fail(std::string("unexpected character '") + c + "'", i_);
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t begin, std::size_t end)
      : toks_(std::move(tokens)), i_(begin), end_(end) {}

  SelectPtr statement() {
    auto sel = select_stmt();
    if (i_ != end_) fail_here("unexpected token after end of statement");
    return sel;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t j = i_ + ahead;
    return j < end_ ? toks_[j] : toks_.back();
  }
  bool at_end() const { return i_ >= end_; }

  [[noreturn]] void fail_here(const std::string& what) const {
    const auto& t = peek();
    std::string near = at_end() ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::Syntax,
                "syntax error at position " + std::to_string(t.pos + 1) + " near " + near + ": " + what,
                std::to_string(t.pos + 1));
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw Error(ErrorCode::Unsupported, "unsupported SQL: " + what, std::to_string(peek().pos + 1));
  }

  bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return (i_ + ahead) < end_ && t.kind == Tok::Ident && t.upper == kw;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return (i_ + ahead) < end_ && t.kind == Tok::Punct && t.text == p;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    ++i_;
    return true;
  }
  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    ++i_;
    return true;
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail_here("expected " + std::string(kw));
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail_here("expected '" + std::string(p) + "'");
  }

  bool is_name_token(std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    if (i_ + ahead >= end_) return false;
    if (t.kind == Tok::QuotedIdent) return true;
    return t.kind == Tok::Ident && !reserved().count(t.upper);
  }
  std::string name(const char* what) {
    if (!is_name_token()) fail_here(std::string("expected ") + what);
    return toks_[i_++].text;
  }

  std::string optional_alias() {
    if (accept_kw("AS")) {
      if (peek().kind == Tok::String && !at_end()) return toks_[i_++].text;
      return name("alias");
    }
    if (is_name_token()) return toks_[i_++].text;
    return {};
  }

  SelectPtr select_stmt() {
    auto sel = std::make_shared<Select>();
    sel->cores.push_back(select_core());
    while (true) {
      if (accept_kw("UNION")) {
        sel->union_all.push_back(accept_kw("ALL"));
        sel->cores.push_back(select_core());
      } else if (is_kw("INTERSECT") || is_kw("EXCEPT")) {
        unsupported(peek().upper);
      } else {
        break;
      }
    }
    if (accept_kw("ORDER")) {
      expect_kw("BY");
      do {
        OrderItem item;
        item.expr = expr();
        if (is_kw("COLLATE")) unsupported("COLLATE");
        if (accept_kw("DESC")) {
          item.desc = true;
        } else {
          accept_kw("ASC");
        }
        if (is_kw("NULLS")) unsupported("NULLS FIRST/LAST");
        sel->order_by.push_back(std::move(item));
      } while (accept_punct(","));
    }
    if (accept_kw("LIMIT")) {
      auto first = expr();
      if (accept_kw("OFFSET")) {
        sel->limit = first;
        sel->offset = expr();
      } else if (accept_punct(",")) {
        sel->offset = first;
        sel->limit = expr();
      } else {
        sel->limit = first;
      }
    }
    return sel;
  }

  SelectCore select_core() {
    if (is_kw("VALUES")) unsupported("VALUES");
    expect_kw("SELECT");
    SelectCore core;
    if (accept_kw("DISTINCT")) {
      core.distinct = true;
    } else {
      accept_kw("ALL");
    }
    do {
      core.items.push_back(select_item());
    } while (accept_punct(","));
    if (accept_kw("FROM")) {
      core.from = table_ref();
      while (true) {
        Join j;
        if (accept_punct(",")) {
          j.type = JoinType::Comma;
        } else if (is_kw("NATURAL") || is_kw("RIGHT") || is_kw("FULL")) {
          unsupported(peek().upper + " JOIN");
        } else if (accept_kw("CROSS")) {
          expect_kw("JOIN");
          j.type = JoinType::Cross;
        } else if (accept_kw("LEFT")) {
          accept_kw("OUTER");
          expect_kw("JOIN");
          j.type = JoinType::Left;
        } else if (accept_kw("INNER")) {
          expect_kw("JOIN");
          j.type = JoinType::Inner;
        } else if (accept_kw("JOIN")) {
          j.type = JoinType::Inner;
        } else {
          break;
        }
        j.right = table_ref();
        if (j.type == JoinType::Inner || j.type == JoinType::Left) {
          if (accept_kw("ON")) {
            j.on = expr();
          } else if (is_kw("USING")) {
            unsupported("USING");
          }
        }
        core.joins.push_back(std::move(j));
      }
    }
    if (accept_kw("WHERE")) core.where = expr();
    if (accept_kw("GROUP")) {
      expect_kw("BY");
      do {
        core.group_by.push_back(expr());
      } while (accept_punct(","));
    }
    if (accept_kw("HAVING")) core.having = expr();
    if (is_kw("WINDOW")) unsupported("WINDOW");
    return core;
  }

  SelectItem select_item() {
    SelectItem item;
    if (accept_punct("*")) {
      item.star = true;
      return item;
    }
    if (is_name_token() && is_punct(".", 1) && is_punct("*", 2)) {
      item.star = true;
      item.star_table = toks_[i_].text;
      i_ += 3;
      return item;
    }
    item.expr = expr();
    item.alias = optional_alias();
    return item;
  }

  TableRef table_ref() {
    TableRef ref;
    if (accept_punct("(")) {
      if (!is_kw("SELECT")) fail_here("expected subquery");
      ref.subquery = select_stmt();
      expect_punct(")");
    } else {
      ref.name = name("table name");
      if (is_punct(".")) unsupported("schema-qualified table names");
      if (is_punct("(")) unsupported("table-valued functions");
    }
    ref.alias = optional_alias();
    return ref;
  }

  // ------------------------------------------------------------ expressions

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    auto lhs = and_expr();
    while (accept_kw("OR")) lhs = make_binary("OR", lhs, and_expr());
    return lhs;
  }

  ExprPtr and_expr() {
    auto lhs = not_expr();
    while (accept_kw("AND")) lhs = make_binary("AND", lhs, not_expr());
    return lhs;
  }

  ExprPtr not_expr() {
    if (is_kw("NOT") && !is_kw("EXISTS", 1)) {
      ++i_;
      return make_unary("NOT", not_expr());
    }
    return equality_expr();
  }

  ExprPtr equality_expr() {
    auto lhs = relational_expr();
    while (true) {
      if (is_punct("=") || is_punct("==") || is_punct("!=") || is_punct("<>")) {
        std::string op = toks_[i_++].text;
        if (op == "==") op = "=";
        if (op == "<>") op = "!=";
        lhs = make_binary(op, lhs, relational_expr());
        continue;
      }
      bool negated = false;
      std::size_t save = i_;
      if (is_kw("NOT") && (is_kw("LIKE", 1) || is_kw("IN", 1) || is_kw("BETWEEN", 1))) {
        negated = true;
        ++i_;
      }
      if (accept_kw("LIKE")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Like;
        e->negated = negated;
        e->args = {lhs, relational_expr()};
        if (is_kw("ESCAPE")) unsupported("ESCAPE");
        lhs = e;
      } else if (accept_kw("IN")) {
        auto e = std::make_shared<Expr>();
        e->negated = negated;
        expect_punct("(");
        if (is_kw("SELECT")) {
          e->kind = ExprKind::InSelect;
          e->args = {lhs};
          e->subquery = select_stmt();
        } else {
          e->kind = ExprKind::InList;
          e->args = {lhs};
          if (is_punct(")")) fail_here("empty IN list");
          do {
            e->args.push_back(expr());
          } while (accept_punct(","));
        }
        expect_punct(")");
        lhs = e;
      } else if (accept_kw("BETWEEN")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Between;
        e->negated = negated;
        auto lo = relational_expr();
        expect_kw("AND");
        auto hi = relational_expr();
        e->args = {lhs, lo, hi};
        lhs = e;
      } else if (accept_kw("IS")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::IsNull;
        e->negated = accept_kw("NOT");
        if (!accept_kw("NULL")) unsupported("IS comparison with a non-NULL operand");
        e->args = {lhs};
        lhs = e;
      } else if (is_kw("GLOB") || is_kw("REGEXP") || is_kw("MATCH") || is_kw("ISNULL") || is_kw("NOTNULL")) {
        unsupported(peek().upper);
      } else {
        i_ = save;
        break;
      }
    }
    return lhs;
  }

  ExprPtr relational_expr() {
    auto lhs = additive_expr();
    while (is_punct("<") || is_punct("<=") || is_punct(">") || is_punct(">=")) {
      std::string op = toks_[i_++].text;
      lhs = make_binary(op, lhs, additive_expr());
    }
    return lhs;
  }

  ExprPtr additive_expr() {
    auto lhs = multiplicative_expr();
    while (is_punct("+") || is_punct("-")) {
      std::string op = toks_[i_++].text;
      lhs = make_binary(op, lhs, multiplicative_expr());
    }
    return lhs;
  }

  ExprPtr multiplicative_expr() {
    auto lhs = concat_expr();
    while (is_punct("*") || is_punct("/") || is_punct("%")) {
      std::string op = toks_[i_++].text;
      lhs = make_binary(op, lhs, concat_expr());
    }
    return lhs;
  }

  ExprPtr concat_expr() {
    auto lhs = unary_expr();
    while (accept_punct("||")) lhs = make_binary("||", lhs, unary_expr());
    return lhs;
  }

  ExprPtr unary_expr() {
    if (is_punct("-") || is_punct("+")) {
      std::string op = toks_[i_++].text;
      if (op == "-" && (peek().kind == Tok::Integer || peek().kind == Tok::Real) && !at_end()) {
        // Fold negative numeric literals so they render without a unary node.
        auto lit = number_literal(toks_[i_++], true);
        return lit;
      }
      auto operand = unary_expr();
      if (op == "+") return operand;
      return make_unary(op, operand);
    }
    return primary();
  }

  ExprPtr number_literal(const Token& t, bool negative) {
    std::string text = (negative ? "-" : "") + t.text;
    if (t.kind == Tok::Integer) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec == std::errc() && p == text.data() + text.size()) return make_literal(v);
    }
    // Out-of-range integers become reals, as in SQLite.
    return make_literal(std::stod(text));
  }

  ExprPtr primary() {
    if (at_end()) fail_here("expected expression");
    const auto& t = peek();
    switch (t.kind) {
      case Tok::Integer:
      case Tok::Real:
        ++i_;
        return number_literal(t, false);
      case Tok::String:
        ++i_;
        return make_literal(t.text);
      case Tok::Punct:
        if (t.text == "(") {
          ++i_;
          if (is_kw("SELECT")) {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Subquery;
            e->subquery = select_stmt();
            expect_punct(")");
            return e;
          }
          auto inner = expr();
          if (is_punct(",")) unsupported("row values");
          expect_punct(")");
          return inner;
        }
        fail_here("expected expression");
      case Tok::QuotedIdent:
      case Tok::Ident:
        break;
      case Tok::End:
        fail_here("expected expression");
    }
    if (t.kind == Tok::Ident) {
      if (t.upper == "NULL") {
        ++i_;
        return make_literal(Null{});
      }
      if (t.upper == "TRUE" || t.upper == "FALSE") {
        ++i_;
        return make_literal(t.upper == "TRUE");
      }
      if (t.upper == "CASE") return case_expr();
      if (t.upper == "EXISTS" || (t.upper == "NOT" && is_kw("EXISTS", 1))) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Exists;
        e->negated = accept_kw("NOT");
        expect_kw("EXISTS");
        expect_punct("(");
        e->subquery = select_stmt();
        expect_punct(")");
        return e;
      }
      if (t.upper == "CAST") unsupported("CAST");
      if (reserved().count(t.upper) && !is_punct("(", 1)) fail_here("unexpected keyword");
    }
    // Function call or column reference.
    if (is_punct("(", 1) && t.kind == Tok::Ident) {
      ++i_;
      ++i_;
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Function;
      e->name = t.upper;
      if (accept_punct("*")) {
        e->star = true;
        expect_punct(")");
        return e;
      }
      if (accept_kw("DISTINCT")) e->distinct = true;
      if (!accept_punct(")")) {
        do {
          e->args.push_back(expr());
        } while (accept_punct(","));
        expect_punct(")");
      }
      if (is_kw("FILTER") || is_kw("OVER")) unsupported("window or filter clauses");
      return e;
    }
    std::string first = toks_[i_++].text;
    if (accept_punct(".")) {
      auto col = name("column name");
      if (is_punct(".")) unsupported("schema-qualified column names");
      return make_column(col, first);
    }
    return make_column(first);
  }

  ExprPtr case_expr() {
    expect_kw("CASE");
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Case;
    if (!is_kw("WHEN")) e->case_operand = expr();
    if (!is_kw("WHEN")) fail_here("expected WHEN");
    while (accept_kw("WHEN")) {
      auto cond = expr();
      expect_kw("THEN");
      auto val = expr();
      e->whens.emplace_back(cond, val);
    }
    if (accept_kw("ELSE")) e->else_expr = expr();
    expect_kw("END");
    return e;
  }

  std::vector<Token> toks_;
  std::size_t i_;
  std::size_t end_;
};

}  // namespace

SelectPtr parse(std::string_view text) {
  auto tokens = Lexer(text).run();
  // Split into statements at top-level semicolons.
  std::vector<std::pair<std::size_t, std::size_t>> stmts;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind == Tok::Punct && t.text == "(") ++depth;
    if (t.kind == Tok::Punct && t.text == ")") --depth;
    bool boundary = t.kind == Tok::End || (t.kind == Tok::Punct && t.text == ";" && depth <= 0);
    if (boundary) {
      if (i > start) stmts.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (stmts.empty()) throw Error(ErrorCode::Syntax, "syntax error: empty statement", "1");
  for (const auto& [b, e] : stmts) {
    const auto& first = tokens[b];
    if (first.kind == Tok::Ident && write_verbs().count(first.upper))
      throw Error(ErrorCode::ReadOnly, "read-only violation: " + first.upper + " statements are not allowed",
                  first.upper);
  }
  if (stmts.size() > 1)
    throw Error(ErrorCode::MultipleStatements,
                "multiple statements are not allowed (found " + std::to_string(stmts.size()) + ")");
  auto [b, e] = stmts.front();
  const auto& first = tokens[b];
  if (first.kind == Tok::Ident && first.upper == "WITH")
    throw Error(ErrorCode::Unsupported, "unsupported SQL: common table expressions", "WITH");
  if (!(first.kind == Tok::Ident && first.upper == "SELECT"))
    throw Error(ErrorCode::Syntax,
                "syntax error at position " + std::to_string(first.pos + 1) + " near '" + first.text +
                    "': expected SELECT",
                std::to_string(first.pos + 1));
  // Stray ';' tokens inside the statement (e.g. within parentheses) are syntax errors.
  for (std::size_t i = b; i < e; ++i)
    if (tokens[i].kind == Tok::Punct && tokens[i].text == ";")
      throw Error(ErrorCode::Syntax, "syntax error at position " + std::to_string(tokens[i].pos + 1) + " near ';'",
                  std::to_string(tokens[i].pos + 1));
  Parser parser(tokens, b, e);
  return parser.statement();
}

}  // namespace dsqa::sql
