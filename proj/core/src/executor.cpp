#include "dsqa/executor.hpp"

#include <algorithm>
#include <future>

#include "dsqa/error.hpp"

namespace dsqa {

std::string_view to_string(AnswerType type) { return type == AnswerType::Scalar ? "scalar" : "table"; }

AnswerType answer_type_from_string(std::string_view name) {
  if (name == "scalar") return AnswerType::Scalar;
  if (name == "table") return AnswerType::Table;
  throw Error(ErrorCode::Parse, "unknown answer type '" + std::string(name) + "'");
}

std::string AnswerValue::text() const {
  if (kind == AnswerType::Scalar) return render_value(scalar);
  return canonical_bytes(table);
}

AnswerValue answer_from_frame(const ResultFrame& frame, AnswerType expected) {
  AnswerValue out;
  bool one_cell = frame.row_count() == 1 && frame.column_count() == 1;
  if (expected == AnswerType::Scalar && one_cell) {
    out.kind = AnswerType::Scalar;
    out.scalar = frame.rows[0][0];
    return out;
  }
  out.kind = AnswerType::Table;
  out.table = frame;
  out.shape_mismatch = expected == AnswerType::Scalar;
  return out;
}

Executor::Executor(Store& store, DetailFetch fetch, std::chrono::milliseconds timeout)
    : store_(store), fetch_(std::move(fetch)), timeout_(timeout) {}

void Executor::materialize(const std::vector<std::string>& tables, Session& session, ExecutionTrace* trace) const {
  if (tables.empty()) return;
  if (session.player_ids.empty())
    throw Error(ErrorCode::Planning, "ambiguous player scope: no resolved player for " + tables.front(),
                tables.front());
  std::vector<std::int64_t> players(session.player_ids.begin(),
                                    session.player_ids.begin() +
                                        static_cast<std::ptrdiff_t>(std::min(kMaxJitPlayers, session.player_ids.size())));
  for (const auto& table : tables) {
    // Fetches for distinct players run concurrently; materialization keeps
    // player order so results do not depend on scheduling.
    std::vector<std::future<std::vector<Row>>> pending;
    for (auto pid : players)
      pending.push_back(std::async(std::launch::async, [this, pid, &table] { return fetch_(pid, table); }));
    std::vector<std::vector<Row>> fetched;
    for (auto& f : pending) fetched.push_back(f.get());
    for (std::size_t i = 0; i < players.size(); ++i)
      store_.materialize_ephemeral(table, players[i], std::move(fetched[i]), session);
    if (trace) {
      trace->fetched_tables.push_back(table);
      trace->fetch_calls += players.size();
    }
  }
}

ResultFrame Executor::execute(const sql::ValidatedSql& sql, Session& session, ExecutionTrace* trace) const {
  ExecutionTrace local;
  ExecutionTrace& t = trace ? *trace : local;
  auto run = [&] {
    ++t.executions;
    try {
      auto frame = store_.query(sql.text, &session, timeout_);
      frame.provenance.snapshot_id = store_.content_id();
      return frame;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Execution || e.code() == ErrorCode::Timeout)
        throw Error(e.code(), e.what(), sql.text);
      throw;
    }
  };
  try {
    return run();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotMaterialized) throw;
  }
  std::vector<std::string> missing;
  for (const auto& table : sql.dependent_tables)
    if (!store_.is_materialized(session, table)) missing.push_back(table);
  t.jit = true;
  materialize(missing, session, &t);
  try {
    return run();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotMaterialized)
      throw Error(ErrorCode::Execution, std::string(e.what()) + " after just-in-time fetch", sql.text);
    throw;
  }
}

}  // namespace dsqa
