#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/gateway.hpp"
#include "dsqa/prompt.hpp"
#include "dsqa/store.hpp"

namespace dsqa {

struct EntityCandidate {
  std::int64_t id = 0;
  std::string name;
  std::string matched_pattern;

  friend bool operator==(const EntityCandidate&, const EntityCandidate&) = default;
};

struct ResolvedEntities {
  std::vector<EntityCandidate> players;
  std::vector<EntityCandidate> teams;
  std::string lookup_sql;  // normalized; empty when the model replied NONE
  bool ambiguous = false;

  bool empty() const { return players.empty() && teams.empty(); }
};

/// Most candidates forwarded per entity kind.
inline constexpr std::size_t kMaxCandidates = 10;

/// Columns the lookup prompt exposes: ids and names of players and teams.
std::string lookup_schema_text(const SchemaCatalog& catalog);

CompletionRequest build_lookup_prompt(std::string_view question, const SchemaCatalog& catalog,
                                      const PromptTemplate& tmpl);

/// One SELECT branch of a lookup query, split into its OR-ed surface forms.
struct LookupBranch {
  std::string table;                 // players | teams
  std::vector<std::string> forms;    // rendered predicates, one per surface form
  std::vector<std::string> patterns; // LIKE pattern text per form
};

/// Validates lookup SQL: SELECT or UNION of SELECTs, each over players or
/// teams alone, filtered only by LIKE predicates on name columns (optionally
/// wrapped in LOWER/UPPER) combined with AND/OR. Throws Error(Resolution)
/// carrying the SQL in detail.
std::vector<LookupBranch> check_lookup_sql(std::string_view sql, const SchemaCatalog& catalog);

/// Receives one audit line per resolution.
using AuditSink = std::function<void(const std::string& line)>;

class EntityResolver {
 public:
  EntityResolver(Store& store, const Gateway& gateway, PromptTemplate tmpl, AuditSink audit = {});

  /// Grounds entity mentions. Resolved player ids are added to the session.
  ResolvedEntities resolve(std::string_view question, Session& session) const;

  /// Executes already-generated lookup SQL (the part of resolve after the
  /// completion).
  ResolvedEntities run_lookup(std::string_view lookup_sql, Session& session) const;

 private:
  Store& store_;
  const Gateway& gateway_;
  PromptTemplate tmpl_;
  AuditSink audit_;
};

/// Text block listing candidates for the SQL-generation prompt.
std::string describe_entities(const ResolvedEntities& entities);

}  // namespace dsqa
