#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/benchgen.hpp"
#include "dsqa/evaluator.hpp"
#include "dsqa/gateway.hpp"
#include "dsqa/pipeline.hpp"

namespace dsqa {

/// What the pipeline produced for one item.
struct BenchPrediction {
  std::string item_id;
  std::optional<AnswerValue> answer;
  std::string sql;
  std::string stage;  // failing stage, empty on success
  std::string error;
};

std::string prediction_to_json(const BenchPrediction& p);
BenchPrediction prediction_from_json(std::string_view line);
std::string export_predictions(std::vector<BenchPrediction> predictions);
std::vector<BenchPrediction> import_predictions(std::string_view text);

using BenchProgress = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every item through the pipeline (charts off, answer shape taken from
/// the item). Stops early, returning what it has, when `cancel` becomes true.
std::vector<BenchPrediction> predict_items(const Pipeline& pipeline, const std::vector<BenchmarkItem>& items,
                                           const BenchProgress& progress = {},
                                           const std::atomic<bool>* cancel = nullptr);

/// Scores predictions against items; a missing prediction counts as an error.
std::vector<EvalResult> score_predictions(const std::vector<BenchmarkItem>& items,
                                          const std::vector<BenchPrediction>& predictions);

/// Predictions equal to the gold answers (for calibrating the evaluator).
std::vector<BenchPrediction> gold_predictions(const std::vector<BenchmarkItem>& items);

/// Lookup reply naming the item's players and teams by exact name, or NONE.
std::string seed_lookup_reply(const BenchmarkItem& item, Store& store);

/// Records mock completions so that a mock-mode pipeline reproduces every
/// item's gold SQL. Returns the number of fixture files written.
std::size_t seed_mock(Store& store, const PipelineAssets& assets, DetailFetch fetch, Recorder& recorder,
                      const std::vector<BenchmarkItem>& items);

}  // namespace dsqa
