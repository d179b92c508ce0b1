#pragma once

#include <string>
#include <string_view>

#include "dsqa/entity.hpp"
#include "dsqa/gateway.hpp"
#include "dsqa/prompt.hpp"
#include "dsqa/sql.hpp"

namespace dsqa {

/// Appended to the user prompt on the single retry after a non-SQL reply.
inline constexpr std::string_view kReturnOnlySql = "Return only SQL.";

CompletionRequest build_sql_prompt(std::string_view question, const ResolvedEntities& entities,
                                   const SchemaCatalog& catalog, const PromptHints& hints, const PromptTemplate& tmpl);

struct PlanResult {
  sql::ValidatedSql sql;
  std::string completion;  // fence-stripped model output that validated
  int attempts = 1;
};

class SqlPlanner {
 public:
  /// Validates the hints against the catalog (Error(Config) on failure).
  SqlPlanner(const Gateway& gateway, const SchemaCatalog& catalog, PromptHints hints, PromptTemplate tmpl);

  /// Obtains and validates SQL. A syntax error on the first completion
  /// triggers one retry with kReturnOnlySql appended; other validation errors
  /// and a second failure propagate with the completion text as detail.
  PlanResult plan(std::string_view question, const ResolvedEntities& entities) const;

  const SchemaCatalog& catalog() const { return catalog_; }
  const PromptHints& hints() const { return hints_; }
  const PromptTemplate& prompt_template() const { return tmpl_; }

 private:
  const Gateway& gateway_;
  const SchemaCatalog& catalog_;
  PromptHints hints_;
  PromptTemplate tmpl_;
};

}  // namespace dsqa
