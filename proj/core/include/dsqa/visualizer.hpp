#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/frame.hpp"
#include "dsqa/gateway.hpp"
#include "dsqa/prompt.hpp"

namespace dsqa {

enum class ChartKind { Line, Bar, HorizontalBar, Scatter, GroupedBar };
enum class VizReason { ExplicitRequest, TemporalSeries, LongRanking, None };

std::string_view to_string(ChartKind kind);
ChartKind chart_kind_from_string(std::string_view name);
std::string_view to_string(VizReason reason);

inline constexpr int kChartSpecVersion = 1;

/// Declarative chart description. `data` holds the canonical bytes of the
/// frame the chart was drawn from.
struct ChartSpec {
  int schema_version = kChartSpecVersion;
  ChartKind kind = ChartKind::Bar;
  std::string x;
  std::vector<std::string> y;
  std::string color;  // empty = none
  std::string title;
  std::string data;
  std::string source_sql;

  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

std::string chart_spec_to_json(const ChartSpec& spec);
/// Throws Error(Parse) for malformed documents or unsupported versions.
ChartSpec chart_spec_from_json(std::string_view json_text);

/// Checks column references and kind arity against the embedded data.
/// Throws Error(Render).
void check_chart_spec(const ChartSpec& spec);

struct VizDecision {
  bool should_plot = false;
  VizReason reason = VizReason::None;
  ChartKind suggested_kind = ChartKind::Bar;
};

/// Minimum rows for a ranking chart, and the lower bound for top-k results
/// (ORDER BY with LIMIT).
inline constexpr std::size_t kRankingRows = 8;
inline constexpr std::size_t kTopKRankingRows = 5;

/// Explicit plot words win, then temporal series, then long rankings.
/// `sql_text` is used to detect the ORDER BY ... LIMIT top-k shape.
VizDecision should_visualize(std::string_view question, const ResultFrame& frame, std::string_view sql_text = {});

/// Rule-based spec for the decision, or nullopt when the frame has no column
/// the kind can plot.
std::optional<ChartSpec> fallback_chart_spec(std::string_view question, const ResultFrame& frame,
                                             const VizDecision& decision, std::string_view source_sql);

CompletionRequest build_chart_prompt(std::string_view question, const ResultFrame& frame, const VizDecision& decision,
                                     const PromptTemplate& tmpl);

struct ChartBuild {
  std::optional<ChartSpec> spec;
  std::vector<std::string> warnings;
  bool from_model = false;
};

/// Asks the gateway (when given) for a spec; falls back to rules when the
/// gateway fails or its reply is unusable. Model-supplied `data` is kept as
/// is and checked later by validate_chart_data; otherwise data is the
/// canonical bytes of `frame`.
ChartBuild build_chart_spec(std::string_view question, const ResultFrame& frame, const VizDecision& decision,
                            const Gateway* gateway, const PromptTemplate* tmpl, std::string_view source_sql);

enum class ChartValidation { Valid, Mismatch };

ChartValidation validate_chart_data(const ChartSpec& spec, const ResultFrame& frame);

struct SettledChart {
  std::optional<ChartSpec> spec;
  ResultFrame frame;
  int requeries = 0;
  std::vector<std::string> warnings;
};

/// The re-query contract: a mismatching spec triggers one re-execution of
/// the source SQL and a rebuild from the fresh frame; a second mismatch drops
/// the chart.
SettledChart settle_chart(ChartSpec spec, ResultFrame frame, const std::function<ResultFrame()>& requery,
                          const std::function<std::optional<ChartSpec>(const ResultFrame&)>& rebuild);

/// Deterministic SVG. Throws Error(Render) ("no rows" for empty data).
std::string render_svg(const ChartSpec& spec);

}  // namespace dsqa
