#include "dsqa/entity.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dsqa/error.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

struct RefTable {
  const char* table;
  const char* id;
  const char* name;
  std::vector<std::string> name_columns;
};

const std::vector<RefTable>& ref_tables() {
  static const std::vector<RefTable> k = {
      {"players", "player_id", "web_name", {"web_name", "first_name", "second_name"}},
      {"teams", "team_id", "team_name", {"team_name"}},
  };
  return k;
}

const RefTable* ref_table(std::string_view name) {
  for (const auto& r : ref_tables())
    if (name == r.table) return &r;
  return nullptr;
}

[[noreturn]] void reject(std::string_view sql, const std::string& why) {
  throw Error(ErrorCode::Resolution, "lookup SQL rejected: " + why, std::string(sql));
}

bool is_name_column(const sql::Expr& e, const RefTable& ref) {
  const sql::Expr* col = &e;
  if (e.kind == sql::ExprKind::Function && (e.name == "LOWER" || e.name == "UPPER") && e.args.size() == 1)
    col = e.args[0].get();
  if (col->kind != sql::ExprKind::Column) return false;
  return std::find(ref.name_columns.begin(), ref.name_columns.end(), col->column) != ref.name_columns.end();
}

const std::string* pattern_literal(const sql::Expr& e) {
  const sql::Expr* lit = &e;
  if (e.kind == sql::ExprKind::Function && (e.name == "LOWER" || e.name == "UPPER") && e.args.size() == 1)
    lit = e.args[0].get();
  if (lit->kind != sql::ExprKind::Literal) return nullptr;
  return std::get_if<std::string>(&lit->literal);
}

// Checks the predicate tree and collects LIKE patterns.
void check_predicate(const sql::Expr& e, const RefTable& ref, std::string_view sql, std::vector<std::string>& patterns) {
  if (e.kind == sql::ExprKind::Binary && (e.op == "AND" || e.op == "OR")) {
    check_predicate(*e.args[0], ref, sql, patterns);
    check_predicate(*e.args[1], ref, sql, patterns);
    return;
  }
  if (e.kind == sql::ExprKind::Like && !e.negated) {
    if (!is_name_column(*e.args[0], ref)) reject(sql, "LIKE must test a name column of " + std::string(ref.table));
    const auto* p = pattern_literal(*e.args[1]);
    if (!p) reject(sql, "LIKE pattern must be a string literal");
    patterns.push_back(*p);
    return;
  }
  reject(sql, "only LIKE predicates combined with AND/OR are allowed");
}

void split_or(const sql::ExprPtr& e, std::vector<sql::ExprPtr>& out) {
  if (e->kind == sql::ExprKind::Binary && e->op == "OR") {
    split_or(e->args[0], out);
    split_or(e->args[1], out);
    return;
  }
  out.push_back(e);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? std::string(sep) : "") + parts[i];
  return out;
}

std::string surface_of(const std::string& pattern) {
  std::string out;
  for (char c : pattern)
    if (c != '%' && c != '_') out += c;
  return ascii_lower(trim(out));
}

// Ranks by edit distance of the lower-cased name to the matched surface form,
// then id; keeps kMaxCandidates.
void rank_and_cap(std::vector<EntityCandidate>& cands) {
  auto distance = [](const EntityCandidate& c) {
    auto surface = surface_of(c.matched_pattern.substr(0, c.matched_pattern.find(" AND ")));
    return edit_distance(ascii_lower(c.name), surface);
  };
  std::stable_sort(cands.begin(), cands.end(), [&](const EntityCandidate& a, const EntityCandidate& b) {
    auto da = distance(a), db = distance(b);
    if (da != db) return da < db;
    return a.id < b.id;
  });
  if (cands.size() > kMaxCandidates) cands.resize(kMaxCandidates);
}

}  // namespace

std::string lookup_schema_text(const SchemaCatalog& catalog) {
  std::vector<std::pair<std::string, std::vector<std::string>>> subset;
  for (const auto& r : ref_tables()) {
    std::vector<std::string> cols{r.id};
    cols.insert(cols.end(), r.name_columns.begin(), r.name_columns.end());
    subset.emplace_back(r.table, cols);
  }
  return render_schema_subset(catalog, subset);
}

CompletionRequest build_lookup_prompt(std::string_view question, const SchemaCatalog& catalog,
                                      const PromptTemplate& tmpl) {
  PromptVars vars{{"question", std::string(trim(question))}, {"schema", lookup_schema_text(catalog)}};
  CompletionRequest req;
  req.tag = PromptTag::EntityLookup;
  req.template_version = tmpl.version_tag();
  req.system_prompt = render_prompt(tmpl.system, vars);
  req.user_prompt = render_prompt(tmpl.user, vars);
  return req;
}

std::vector<LookupBranch> check_lookup_sql(std::string_view sql_text, const SchemaCatalog& catalog) {
  sql::ValidatedSql v;
  try {
    v = sql::validate_sql(sql_text, catalog);
  } catch (const Error& e) {
    throw Error(ErrorCode::Resolution, std::string("lookup SQL invalid: ") + e.what(), std::string(sql_text));
  }
  std::vector<LookupBranch> branches;
  for (const auto& core : v.ast->cores) {
    if (!core.from || core.from->subquery || !core.joins.empty())
      reject(sql_text, "each SELECT must read exactly one reference table");
    const auto* ref = ref_table(core.from->name);
    if (!ref) reject(sql_text, "table " + core.from->name + " is not a reference table");
    if (!core.group_by.empty() || core.having) reject(sql_text, "grouping is not allowed");
    for (const auto& item : core.items)
      if (!item.star && item.expr->kind != sql::ExprKind::Column &&
          !(item.expr->kind == sql::ExprKind::Function && !sql::is_aggregate_function(item.expr->name)))
        reject(sql_text, "projection must list columns");
    if (!core.where) reject(sql_text, "a LIKE filter is required");
    LookupBranch b;
    b.table = ref->table;
    std::vector<sql::ExprPtr> forms;
    split_or(core.where, forms);
    for (const auto& f : forms) {
      std::vector<std::string> patterns;
      check_predicate(*f, *ref, sql_text, patterns);
      b.forms.push_back(sql::render(*f));
      b.patterns.push_back(join(patterns, " AND "));
    }
    branches.push_back(std::move(b));
  }
  return branches;
}

EntityResolver::EntityResolver(Store& store, const Gateway& gateway, PromptTemplate tmpl, AuditSink audit)
    : store_(store), gateway_(gateway), tmpl_(std::move(tmpl)), audit_(std::move(audit)) {}

ResolvedEntities EntityResolver::resolve(std::string_view question, Session& session) const {
  auto req = build_lookup_prompt(question, store_.catalog(), tmpl_);
  auto completion = gateway_.complete(req);
  auto out = run_lookup(completion.text, session);
  if (audit_) {
    audit_("entity_lookup question=" + sha256_hex(trim(question)).substr(0, 16) + " candidates=" +
           std::to_string(out.players.size() + out.teams.size()) + " ambiguous=" + (out.ambiguous ? "1" : "0") +
           " sql=" + (out.lookup_sql.empty() ? "NONE" : out.lookup_sql));
  }
  return out;
}

ResolvedEntities EntityResolver::run_lookup(std::string_view lookup_sql, Session& session) const {
  ResolvedEntities out;
  auto text = trim(lookup_sql);
  if (iequals(text, "NONE") || text.empty()) return out;

  auto branches = check_lookup_sql(text, store_.catalog());
  out.lookup_sql = sql::validate_sql(text, store_.catalog()).text;

  std::map<std::string, std::vector<EntityCandidate>> by_table;
  std::map<std::string, std::set<std::int64_t>> seen;
  for (const auto& b : branches) {
    const auto* ref = ref_table(b.table);
    for (std::size_t i = 0; i < b.forms.size(); ++i) {
      auto frame = store_.query(std::string("SELECT ") + ref->id + ", " + ref->name + " FROM " + ref->table +
                                    " WHERE " + b.forms[i] + " ORDER BY " + ref->id,
                                &session);
      if (frame.row_count() > 1) out.ambiguous = true;
      for (const auto& row : frame.rows) {
        auto id = std::get<std::int64_t>(row[0]);
        if (!seen[b.table].insert(id).second) continue;
        by_table[b.table].push_back({id, std::get<std::string>(row[1]), b.patterns[i]});
      }
    }
  }
  out.players = std::move(by_table["players"]);
  out.teams = std::move(by_table["teams"]);
  rank_and_cap(out.players);
  rank_and_cap(out.teams);
  for (const auto& p : out.players)
    if (std::find(session.player_ids.begin(), session.player_ids.end(), p.id) == session.player_ids.end())
      session.player_ids.push_back(p.id);
  return out;
}

std::string describe_entities(const ResolvedEntities& entities) {
  if (entities.empty()) return "(none)";
  std::string out;
  for (const auto& p : entities.players)
    out += "- player_id " + std::to_string(p.id) + ": " + p.name + "\n";
  for (const auto& t : entities.teams) out += "- team_id " + std::to_string(t.id) + ": " + t.name + "\n";
  if (entities.ambiguous) out += "Several candidates matched; pick the one the question refers to.\n";
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace dsqa
