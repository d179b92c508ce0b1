#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/entity.hpp"
#include "dsqa/error.hpp"
#include "dsqa/executor.hpp"
#include "dsqa/gateway.hpp"
#include "dsqa/planner.hpp"
#include "dsqa/prompt.hpp"
#include "dsqa/store.hpp"
#include "dsqa/visualizer.hpp"

namespace dsqa {

inline constexpr int kQaResponseVersion = 1;

/// Prompt templates and hints read from the data directory.
struct PipelineAssets {
  PromptTemplate entity_prompt;
  PromptTemplate sql_prompt;
  PromptTemplate chart_prompt;
  PromptHints hints;

  /// Reads `<dir>/prompts/*.prompt` and `<dir>/hints.toml`.
  static PipelineAssets load(const std::string& data_dir);
};

struct QaOptions {
  bool visualize = true;
  bool render_image = true;
  /// Expected answer shape; inferred from the frame (1x1 = scalar) when unset.
  std::optional<AnswerType> expected;
};

struct QaResponse {
  std::string question;
  AnswerValue answer;
  std::string sql;
  std::string lookup_sql;
  ResolvedEntities entities;
  std::vector<std::string> materialized_tables;
  std::optional<ChartSpec> chart;
  std::optional<std::string> image;
  std::map<std::string, std::int64_t> timings;
  std::vector<std::string> warnings;
  std::string snapshot_id;
};

std::string qa_response_to_json(const QaResponse& response, bool include_timings = true);

/// Failure of one pipeline stage: resolve, plan, execute, visualize, or
/// gateway when a model provider failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause, std::string sql = {});
  const std::string& stage() const noexcept { return stage_; }
  const std::string& sql() const noexcept { return sql_; }
  ErrorCode cause_code() const noexcept { return code(); }

 private:
  std::string stage_;
  std::string sql_;
};

/// `{"stage":..,"message":..,"detail":..}`
std::string error_envelope_json(const std::string& stage, const std::string& message, const std::string& detail);

class Pipeline {
 public:
  Pipeline(Store& store, const Gateway& gateway, PipelineAssets assets, DetailFetch fetch,
           std::chrono::milliseconds query_timeout = std::chrono::seconds(10), AuditSink audit = {});

  /// resolve -> plan -> execute -> visualize. The session is closed on every
  /// path. Throws StageError.
  QaResponse answer_question(std::string_view question, const QaOptions& options = {}) const;

  const PipelineAssets& assets() const { return assets_; }
  Store& store() const { return store_; }
  const Executor& executor() const { return executor_; }

 private:
  Store& store_;
  const Gateway& gateway_;
  PipelineAssets assets_;
  EntityResolver resolver_;
  SqlPlanner planner_;
  Executor executor_;
};

/// Writes the mock completions the pipeline will request for `question`,
/// given the lookup reply, the SQL reply and an optional chart reply. Runs
/// the stages in between against `store` so downstream prompts see the same
/// inputs as a live run. Returns the digests written.
std::vector<std::string> record_question_fixtures(Store& store, const PipelineAssets& assets, DetailFetch fetch,
                                                  Recorder& recorder, std::string_view question,
                                                  const std::string& lookup_reply, const std::string& sql_reply,
                                                  const std::optional<std::string>& chart_reply);

}  // namespace dsqa
