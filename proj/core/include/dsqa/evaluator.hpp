#pragma once

#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/benchgen.hpp"
#include "dsqa/executor.hpp"
#include "dsqa/frame.hpp"
#include "dsqa/sql.hpp"

namespace dsqa {

/// Trim, case-fold, collapse whitespace; numeric strings are rewritten in
/// canonical form (integers without a fractional part, reals shortest
/// round-trip).
std::string normalize_scalar(std::string_view text);

/// 1 when the normalized strings are equal.
int exact_match(std::string_view predicted, std::string_view gold);

/// (row key, column, value) triple.
struct AtomicStatement {
  std::vector<std::string> key;
  std::string column;
  std::string value;

  bool operator<(const AtomicStatement& o) const {
    return std::tie(key, column, value) < std::tie(o.key, o.column, o.value);
  }
  bool operator==(const AtomicStatement& o) const {
    return key == o.key && column == o.column && value == o.value;
  }
};

/// Index of the key column: the leftmost text column, or nullopt when the
/// whole tuple is the key.
std::optional<std::size_t> key_column(const ResultFrame& frame);

/// One statement per (row, non-key column), or per (row, column) when the
/// whole tuple is the key. All parts are normalized; the result is a sorted
/// set.
std::vector<AtomicStatement> decompose(const ResultFrame& frame);

/// Decides whether a predicted statement is supported by a gold statement.
class StatementMatcher {
 public:
  virtual ~StatementMatcher() = default;
  virtual bool matches(const AtomicStatement& predicted, const AtomicStatement& gold) const = 0;
};

/// Equal keys and columns; values equal after normalization or numerically
/// within a relative tolerance.
class NormalizedMatcher : public StatementMatcher {
 public:
  explicit NormalizedMatcher(double rel_tolerance = 1e-9) : tol_(rel_tolerance) {}
  bool matches(const AtomicStatement& predicted, const AtomicStatement& gold) const override;
  bool values_match(const std::string& a, const std::string& b) const;

 private:
  double tol_;
};

struct TableScores {
  double correctness = 0;
  double completeness = 0;
  double overall = 0;
};

/// Precision/recall/F1 over atomic statements. Throws Error(UndefinedGold)
/// when the gold table decomposes to nothing.
TableScores table_eval(const ResultFrame& predicted, const ResultFrame& gold, const StatementMatcher* matcher = nullptr);

struct EvalResult {
  std::string item_id;
  AnswerType kind = AnswerType::Scalar;
  int em = 0;                 // scalar items
  TableScores scores;         // table items
  sql::PrimitiveSet primitives;
  std::string error;          // stage failure, if any

  std::size_t primitive_count() const { return primitives.size(); }

  /// Success used for per-complexity accuracy: EM for scalars, Overall == 1
  /// for tables.
  bool correct() const;
};

/// Scores one prediction (nullopt = the pipeline failed).
EvalResult evaluate_item(const BenchmarkItem& item, const std::optional<AnswerValue>& predicted,
                         const std::string& error = {}, const StatementMatcher* matcher = nullptr);

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// Wilson score interval; Error(Domain) when n == 0 or successes > n.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.96);

struct ComplexityPoint {
  std::size_t primitive_count = 0;
  std::size_t n = 0;
  std::size_t successes = 0;
  double accuracy = 0;
  Interval ci;
};

struct ComboStat {
  std::size_t n = 0;
  std::size_t successes = 0;
  double accuracy = 0;
};

struct EvalReport {
  std::string label;
  std::size_t n_items = 0;
  std::size_t n_scalar = 0;
  std::size_t n_table = 0;
  std::size_t n_errors = 0;
  double string_em = 0;   // percent over scalar items
  TableScores table;      // macro averages over table items
  std::map<std::string, ComboStat> by_combination;  // "Calculate+Filter+Retrieve"
  std::vector<ComplexityPoint> by_complexity;
  /// Co-occurrence accuracy per primitive pair (first <= second); cells
  /// without support are absent.
  std::map<std::pair<std::string, std::string>, ComboStat> heatmap;
};

/// Order-independent: results are sorted by item_id before any summation.
EvalReport aggregate(std::vector<EvalResult> results, std::string label = "dsqa");

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);
/// Table in the layout `Model  String EM  Correctness  Completeness  Overall`.
std::string report_text(const EvalReport& report);
std::string complexity_csv(const EvalReport& report);
std::string heatmap_csv(const EvalReport& report);

std::string result_to_json(const EvalResult& result);
EvalResult result_from_json(std::string_view line);

}  // namespace dsqa
