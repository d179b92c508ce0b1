#include "dsqa/pipeline.hpp"

#include <chrono>
#include <filesystem>

#include "json_util.hpp"

#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using detail::json;
using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

bool gateway_failure(const Error& e) {
  return e.code() == ErrorCode::MockMiss || e.code() == ErrorCode::Provider;
}

json entities_to_json(const ResolvedEntities& e) {
  auto list = [](const std::vector<EntityCandidate>& cands, const char* id_key) {
    json arr = json::array();
    for (const auto& c : cands) arr.push_back({{id_key, c.id}, {"name", c.name}, {"matched_pattern", c.matched_pattern}});
    return arr;
  };
  return {{"players", list(e.players, "player_id")}, {"teams", list(e.teams, "team_id")}, {"ambiguous", e.ambiguous}};
}

// Answers from a fixed reply per tag and records every request it sees.
class ScriptedProvider : public Provider {
 public:
  ScriptedProvider(std::map<PromptTag, std::string> replies, Recorder& recorder)
      : replies_(std::move(replies)), recorder_(recorder) {}
  std::string name() const override { return "scripted"; }
  std::string complete(const CompletionRequest& req, bool& truncated) override {
    truncated = false;
    auto it = replies_.find(req.tag);
    if (it == replies_.end())
      throw Error(ErrorCode::MockMiss, "no scripted reply for " + std::string(to_string(req.tag)));
    auto result = recorder_.record(req, it->second);
    digests.push_back(result.record.request_digest);
    return it->second;
  }
  std::vector<std::string> digests;

 private:
  std::map<PromptTag, std::string> replies_;
  Recorder& recorder_;
};

}  // namespace

PipelineAssets PipelineAssets::load(const std::string& data_dir) {
  auto prompts = (std::filesystem::path(data_dir) / "prompts").string();
  PipelineAssets a;
  a.entity_prompt = load_prompt(prompts, "entity_lookup");
  a.sql_prompt = load_prompt(prompts, "sql_gen");
  a.chart_prompt = load_prompt(prompts, "chart_gen");
  a.hints = PromptHints::load((std::filesystem::path(data_dir) / "hints.toml").string());
  return a;
}

StageError::StageError(std::string stage, const Error& cause, std::string sql)
    : Error(cause.code(), stage + " failed: " + cause.what(), cause.detail()),
      stage_(std::move(stage)),
      sql_(std::move(sql)) {}

std::string error_envelope_json(const std::string& stage, const std::string& message, const std::string& detail) {
  return json{{"stage", stage}, {"message", message}, {"detail", detail}}.dump();
}

std::string qa_response_to_json(const QaResponse& r, bool include_timings) {
  json j{{"schema_version", kQaResponseVersion},
         {"question", r.question},
         {"answer", detail::answer_to_json(r.answer)},
         {"sql", r.sql},
         {"lookup_sql", r.lookup_sql},
         {"entities", entities_to_json(r.entities)},
         {"materialized_tables", r.materialized_tables},
         {"chart", r.chart ? json::parse(chart_spec_to_json(*r.chart)) : json(nullptr)},
         {"image", r.image ? json(*r.image) : json(nullptr)},
         {"warnings", r.warnings},
         {"snapshot_id", r.snapshot_id}};
  if (include_timings) j["timings"] = r.timings;
  return j.dump();
}

Pipeline::Pipeline(Store& store, const Gateway& gateway, PipelineAssets assets, DetailFetch fetch,
                   std::chrono::milliseconds query_timeout, AuditSink audit)
    : store_(store),
      gateway_(gateway),
      assets_(std::move(assets)),
      resolver_(store, gateway, assets_.entity_prompt, std::move(audit)),
      planner_(gateway, store.catalog(), assets_.hints, assets_.sql_prompt),
      executor_(store, std::move(fetch), query_timeout) {}

QaResponse Pipeline::answer_question(std::string_view question, const QaOptions& options) const {
  if (trim(question).empty()) throw StageError("input", Error(ErrorCode::Config, "question is empty"));
  auto total = Clock::now();
  QaResponse r;
  r.question = std::string(trim(question));
  auto session = store_.open_session();

  auto stage = [&](const char* name, const std::string& sql, auto&& fn) {
    auto started = Clock::now();
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(gateway_failure(e) ? "gateway" : name, e, sql);
    } catch (const std::exception& e) {
      throw StageError(name, Error(ErrorCode::Execution, e.what()), sql);
    }
    r.timings[std::string(name) + "_ms"] = elapsed_ms(started);
  };

  stage("resolve", "", [&] {
    r.entities = resolver_.resolve(r.question, session);
    r.lookup_sql = r.entities.lookup_sql;
    if (r.entities.ambiguous)
      r.warnings.push_back("ambiguous entity: " + std::to_string(r.entities.players.size() + r.entities.teams.size()) +
                           " candidates forwarded");
  });

  PlanResult plan;
  stage("plan", r.lookup_sql, [&] {
    plan = planner_.plan(r.question, r.entities);
    r.sql = plan.sql.text;
    if (plan.attempts > 1) r.warnings.push_back("SQL generation needed a retry");
  });

  ResultFrame frame;
  stage("execute", r.sql, [&] {
    ExecutionTrace trace;
    frame = executor_.execute(plan.sql, session, &trace);
    r.materialized_tables = frame.provenance.materialized_tables;
  });

  if (options.visualize) {
    stage("visualize", r.sql, [&] {
      auto decision = should_visualize(r.question, frame, r.sql);
      if (!decision.should_plot) return;
      auto built = build_chart_spec(r.question, frame, decision, &gateway_, &assets_.chart_prompt, r.sql);
      r.warnings.insert(r.warnings.end(), built.warnings.begin(), built.warnings.end());
      if (!built.spec) return;
      auto settled = settle_chart(
          std::move(*built.spec), frame, [&] { return executor_.execute(plan.sql, session); },
          [&](const ResultFrame& fresh) { return fallback_chart_spec(r.question, fresh, decision, r.sql); });
      r.warnings.insert(r.warnings.end(), settled.warnings.begin(), settled.warnings.end());
      frame = std::move(settled.frame);
      r.chart = std::move(settled.spec);
      if (r.chart && options.render_image) {
        try {
          r.image = render_svg(*r.chart);
        } catch (const Error& e) {
          r.warnings.push_back(std::string("chart image not rendered: ") + e.what());
        }
      }
    });
  }

  AnswerType expected = options.expected.value_or(
      frame.row_count() == 1 && frame.column_count() == 1 ? AnswerType::Scalar : AnswerType::Table);
  r.answer = answer_from_frame(frame, expected);
  if (r.answer.shape_mismatch) r.warnings.push_back("expected a scalar answer but the result is a table");
  r.snapshot_id = store_.content_id();
  session.close();
  r.timings["total_ms"] = elapsed_ms(total);
  return r;
}

std::vector<std::string> record_question_fixtures(Store& store, const PipelineAssets& assets, DetailFetch fetch,
                                                  Recorder& recorder, std::string_view question,
                                                  const std::string& lookup_reply, const std::string& sql_reply,
                                                  const std::optional<std::string>& chart_reply) {
  std::map<PromptTag, std::string> replies{{PromptTag::EntityLookup, lookup_reply}, {PromptTag::SqlGen, sql_reply}};
  if (chart_reply) replies[PromptTag::ChartGen] = *chart_reply;
  auto provider = std::make_shared<ScriptedProvider>(std::move(replies), recorder);
  Gateway gateway(provider);
  Pipeline pipeline(store, gateway, assets, std::move(fetch));
  QaOptions options;
  options.visualize = chart_reply.has_value();
  options.render_image = false;
  pipeline.answer_question(question, options);
  return provider->digests;
}

}  // namespace dsqa
