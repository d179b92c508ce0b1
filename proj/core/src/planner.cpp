#include "dsqa/planner.hpp"

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

CompletionRequest build_sql_prompt(std::string_view question, const ResolvedEntities& entities,
                                   const SchemaCatalog& catalog, const PromptHints& hints, const PromptTemplate& tmpl) {
  validate_hints(hints, catalog);
  PromptVars vars{{"question", std::string(trim(question))},
                  {"schema", render_schema_text(catalog)},
                  {"hints", render_hints(hints)},
                  {"entities", describe_entities(entities)}};
  CompletionRequest req;
  req.tag = PromptTag::SqlGen;
  req.template_version = tmpl.version_tag();
  req.system_prompt = render_prompt(tmpl.system, vars);
  req.user_prompt = render_prompt(tmpl.user, vars);
  return req;
}

SqlPlanner::SqlPlanner(const Gateway& gateway, const SchemaCatalog& catalog, PromptHints hints, PromptTemplate tmpl)
    : gateway_(gateway), catalog_(catalog), hints_(std::move(hints)), tmpl_(std::move(tmpl)) {
  validate_hints(hints_, catalog_);
}

PlanResult SqlPlanner::plan(std::string_view question, const ResolvedEntities& entities) const {
  auto req = build_sql_prompt(question, entities, catalog_, hints_, tmpl_);
  auto attempt = [&](const CompletionRequest& r) {
    auto completion = gateway_.complete(r);
    try {
      return PlanResult{sql::validate_sql(completion.text, catalog_), completion.text, 1};
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), completion.text);
    }
  };
  try {
    return attempt(req);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Syntax) throw;
  }
  auto retry = req;
  retry.user_prompt += "\n\n" + std::string(kReturnOnlySql);
  auto out = attempt(retry);
  out.attempts = 2;
  return out;
}

}  // namespace dsqa
