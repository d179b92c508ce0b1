#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/frame.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/store.hpp"

namespace dsqa {

enum class AnswerType { Scalar, Table };

std::string_view to_string(AnswerType type);
AnswerType answer_type_from_string(std::string_view name);

/// Tagged scalar-or-table answer.
struct AnswerValue {
  AnswerType kind = AnswerType::Table;
  Value scalar;
  ResultFrame table;
  /// Set when a scalar was expected but the frame was not 1x1.
  bool shape_mismatch = false;

  /// Scalar text for scalars; canonical frame bytes for tables.
  std::string text() const;
};

AnswerValue answer_from_frame(const ResultFrame& frame, AnswerType expected);

/// Rows of one ephemeral table for one player (normally
/// Ingestor::fetch_player_detail).
using DetailFetch = std::function<std::vector<Row>(std::int64_t player_id, std::string_view table)>;

/// Most players fetched for one just-in-time materialization.
inline constexpr std::size_t kMaxJitPlayers = 10;

struct ExecutionTrace {
  bool jit = false;
  std::vector<std::string> fetched_tables;
  std::size_t fetch_calls = 0;
  int executions = 0;
};

class Executor {
 public:
  Executor(Store& store, DetailFetch fetch, std::chrono::milliseconds timeout = std::chrono::seconds(10));

  /// Runs the statement. A missing ephemeral table is fetched for every
  /// session player id (at most kMaxJitPlayers), materialized, and the
  /// statement re-executed exactly once.
  ResultFrame execute(const sql::ValidatedSql& sql, Session& session, ExecutionTrace* trace = nullptr) const;

  /// Fetches and materializes `tables` up front (the pre-materialized path).
  void materialize(const std::vector<std::string>& tables, Session& session, ExecutionTrace* trace = nullptr) const;

 private:
  Store& store_;
  DetailFetch fetch_;
  std::chrono::milliseconds timeout_;
};

}  // namespace dsqa
