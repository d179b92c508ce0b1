#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/executor.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/store.hpp"

namespace dsqa {

inline constexpr int kBenchmarkSchemaVersion = 1;

enum class SlotKind { Player, Team, Int, Choice };

/// One placeholder declared in a template's base question.
struct SlotDecl {
  std::string name;
  SlotKind kind = SlotKind::Choice;
  std::string position;             // player slots: optional position filter (GKP, DEF, MID, FWD)
  std::int64_t lo = 0, hi = 0;      // int slots
  /// Choice slots: (question text, SQL text); `label=value` in the pack,
  /// a bare item uses the same text for both.
  std::vector<std::pair<std::string, std::string>> choices;
};

struct QuestionTemplate {
  std::string template_id;
  std::string base_text;
  std::vector<std::string> rephrasings;  // exactly 3
  std::string gold_sql_template;
  AnswerType answer_type = AnswerType::Scalar;
  std::vector<SlotDecl> slots;
  std::size_t line = 0;  // position in the pack file
};

/// Parses a template pack (format in docs/formats.md). Throws
/// Error(Template) naming the template id and line.
std::vector<QuestionTemplate> parse_template_pack(std::string_view text);
std::vector<QuestionTemplate> load_template_pack(const std::string& path);

/// A concrete value chosen for a slot.
struct SlotValue {
  std::string text;               // {name} in questions
  std::optional<std::int64_t> id;  // players and teams
  std::string sql_text;            // {name} in SQL; equals text unless a choice label differs
};

struct BenchmarkItem {
  std::string item_id;
  std::string template_id;  // empty for manual items
  std::string question;
  std::string gold_sql;
  AnswerType answer_type = AnswerType::Scalar;
  AnswerValue gold_answer;
  std::string snapshot_id;
  sql::PrimitiveSet primitives;
  std::vector<std::string> dependent_tables;
  std::vector<std::int64_t> player_ids;
  std::vector<std::int64_t> team_ids;
  bool empty_gold = false;
};

/// Domain of one slot drawn from the store, in primary-key order.
std::vector<SlotValue> slot_domain(const SlotDecl& slot, Store& store);

/// Deterministic selection of at most `values_per_slot` values, seeded by
/// template id and slot name; the result keeps domain order.
std::vector<SlotValue> sample_slot(const std::string& template_id, const SlotDecl& slot,
                                   const std::vector<SlotValue>& domain, std::size_t values_per_slot);

/// Substitutes `{name}`, `{name.id}` and `{name.sql}` (quoted literal)
/// references; `sql_context` selects the SQL text of each value.
std::string fill_placeholders(std::string_view text, const std::vector<SlotDecl>& slots,
                              const std::vector<SlotValue>& values, bool sql_context);

struct InstantiateOptions {
  std::size_t values_per_slot = 2;
};

/// Executes gold SQL under a fresh session seeded with the item's players;
/// errors become Error(Annotation) carrying the SQL.
AnswerValue author_gold_answer(const BenchmarkItem& item, Store& store, const Executor& executor);

/// Expands templates into items (3 per slot combination), validating and
/// executing every gold SQL. Throws Error(Template) naming the template id
/// when gold SQL does not validate and Error(Instantiation) for empty slot
/// domains.
std::vector<BenchmarkItem> instantiate(const std::vector<QuestionTemplate>& templates, Store& store,
                                       const Executor& executor, const InstantiateOptions& options = {});

/// Hand-written items (`{"item_id","question","gold_sql","answer_type",
/// "player_ids"?, "team_ids"?}` per line); gold answers are authored here.
std::vector<BenchmarkItem> load_manual_items(const std::string& path, Store& store, const Executor& executor);

std::string item_to_json(const BenchmarkItem& item);
BenchmarkItem item_from_json(std::string_view line);

/// One JSON object per line, sorted by item_id.
std::string export_items(std::vector<BenchmarkItem> items);
std::vector<BenchmarkItem> import_items(std::string_view text);

struct ReproFailure {
  std::string item_id;
  std::string reason;
};

/// Re-executes every gold SQL against the store (which must hold the pinned
/// snapshot) and compares with the recorded answer. Returns failures in item
/// order.
std::vector<ReproFailure> verify_gold(const std::vector<BenchmarkItem>& items, Store& store, const Executor& executor);

}  // namespace dsqa
