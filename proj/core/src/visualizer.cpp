#include "dsqa/visualizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/sql.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;

const char* const kExplicitWords[] = {"plot",  "plots",  "plotted", "graph",     "graphs",       "chart",
                                      "charts", "trend", "trends",  "visualize", "visualise",    "visualization",
                                      "scatter", "scatterplot", "scatterplots"};

const char* const kTemporalColumns[] = {"season_name", "season", "event", "gw", "gameweek", "round", "event_name"};

bool is_numeric(ColumnType t) { return t == ColumnType::Integer || t == ColumnType::Real; }

bool is_id_column(const std::string& name) {
  return name == "id" || (name.size() > 3 && name.compare(name.size() - 3, 3, "_id") == 0);
}

std::vector<std::size_t> value_columns(const ResultFrame& f, std::string_view skip = {}) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.columns.size(); ++i)
    if (is_numeric(f.columns[i].type) && !is_id_column(f.columns[i].name) && f.columns[i].name != skip)
      out.push_back(i);
  return out;
}

std::optional<std::size_t> first_text_column(const ResultFrame& f) {
  for (std::size_t i = 0; i < f.columns.size(); ++i)
    if (f.columns[i].type == ColumnType::Text) return i;
  return std::nullopt;
}

std::optional<std::size_t> temporal_column(const ResultFrame& f) {
  for (const char* name : kTemporalColumns) {
    auto idx = f.column_index(name);
    if (!idx) continue;
    std::set<std::string> distinct;
    for (const auto& r : f.rows) distinct.insert(render_value(r[*idx]));
    if (distinct.size() >= 3) return idx;
  }
  return std::nullopt;
}

bool monotone(const ResultFrame& f, std::size_t col) {
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < f.rows.size(); ++i) {
    int c = compare_values(f.rows[i - 1][col], f.rows[i][col]);
    if (c > 0) inc = false;
    if (c < 0) dec = false;
  }
  return inc || dec;
}

bool top_k_shape(std::string_view sql_text) {
  if (sql_text.empty()) return false;
  try {
    auto ast = sql::parse(sql_text);
    return !ast->order_by.empty() && ast->limit != nullptr;
  } catch (const Error&) {
    return false;
  }
}

std::optional<ChartKind> explicit_kind(std::string_view question) {
  if (contains_word(question, "scatter") || contains_word(question, "scatterplot") ||
      contains_word(question, "scatterplots"))
    return ChartKind::Scatter;
  if (contains_word(question, "line")) return ChartKind::Line;
  if (contains_word(question, "grouped")) return ChartKind::GroupedBar;
  if (contains_word(question, "horizontal")) return ChartKind::HorizontalBar;
  if (contains_word(question, "bar") || contains_word(question, "bars")) return ChartKind::Bar;
  return std::nullopt;
}

bool is_ranking(const ResultFrame& f, std::size_t min_rows) {
  if (f.row_count() < min_rows || !first_text_column(f)) return false;
  auto values = value_columns(f);
  return std::any_of(values.begin(), values.end(), [&](std::size_t c) { return monotone(f, c); });
}

// ------------------------------------------------------------ svg helpers

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string label_of(const Value& v) {
  if (is_null(v)) return "";
  return render_value(v);
}

double number_of(const Value& v) {
  auto n = as_number(v);
  return n ? *n : 0.0;
}

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};

struct Axis {
  double lo = 0, hi = 1;
  std::vector<double> ticks;
};

std::string tick_text(double v) {
  if (std::fabs(v - std::round(v)) < 1e-9) return std::to_string(static_cast<long long>(std::llround(v)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Axis nice_axis(double lo, double hi, bool include_zero) {
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (hi - lo < 1e-12) {
    hi = lo + 1;
  }
  double raw = (hi - lo) / 5;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  Axis a;
  a.lo = std::floor(lo / step) * step;
  a.hi = std::ceil(hi / step) * step;
  for (double t = a.lo; t <= a.hi + step * 1e-6; t += step) a.ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
  return a;
}

struct Canvas {
  static constexpr double W = 760, H = 460;
  double left = 70, right = W - 30, top = 50, bottom = H - 70;
  std::string body;

  double sx(const Axis& a, double v) const { return left + (v - a.lo) / (a.hi - a.lo) * (right - left); }
  double sy(const Axis& a, double v) const { return bottom - (v - a.lo) / (a.hi - a.lo) * (bottom - top); }

  void text(double x, double y, std::string_view s, const char* anchor, int size = 11, const char* extra = "") {
    body += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
            "\" text-anchor=\"" + anchor + "\"" + extra + ">" + xml_escape(s) + "</text>\n";
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke = "#333") {
    body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
            "\" stroke=\"" + stroke + "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
            "\" fill=\"" + fill + "\"/>\n";
  }
  void circle(double x, double y, double r, const char* fill) {
    body += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" fill=\"" + fill + "\"/>\n";
  }

  void y_axis(const Axis& a) {
    line(left, top, left, bottom);
    for (double t : a.ticks) {
      double y = sy(a, t);
      line(left - 4, y, left, y);
      body += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(right) + "\" y2=\"" + num(y) +
              "\" stroke=\"#ddd\"/>\n";
      text(left - 7, y + 4, tick_text(t), "end", 10);
    }
  }
  void x_axis(const Axis& a) {
    line(left, bottom, right, bottom);
    for (double t : a.ticks) {
      double x = sx(a, t);
      line(x, bottom, x, bottom + 4);
      text(x, bottom + 16, tick_text(t), "middle", 10);
    }
  }
  void labels(const ChartSpec& spec, const std::string& x_label, const std::string& y_label) {
    text(W / 2, 28, spec.title, "middle", 15, " font-weight=\"bold\"");
    text((left + right) / 2, H - 18, x_label, "middle", 12);
    double cy = (top + bottom) / 2;
    text(18, cy, y_label, "middle", 12, (" transform=\"rotate(-90 18 " + num(cy) + ")\"").c_str());
  }
  std::string finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
           "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\" font-family=\"sans-serif\">\n" +
           "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) + "\" fill=\"#ffffff\"/>\n" + body +
           "</svg>\n";
  }
};

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

std::pair<double, double> value_range(const ResultFrame& f, const std::vector<std::size_t>& cols) {
  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& r : f.rows)
    for (auto c : cols) {
      if (is_null(r[c])) continue;
      double v = number_of(r[c]);
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo, hi};
}

void category_ticks(Canvas& c, const ResultFrame& f, std::size_t xi, double slot, bool rotate) {
  std::size_t every = std::max<std::size_t>(1, f.row_count() / 20);
  for (std::size_t i = 0; i < f.row_count(); i += every) {
    double x = c.left + slot * (static_cast<double>(i) + 0.5);
    auto label = label_of(f.rows[i][xi]);
    if (rotate) {
      double y = c.bottom + 12;
      c.text(x, y, label, "end", 10, (" transform=\"rotate(-40 " + num(x) + " " + num(y) + ")\"").c_str());
    } else {
      c.text(x, c.bottom + 16, label, "middle", 10);
    }
  }
}

std::vector<std::size_t> y_indices(const ResultFrame& f, const ChartSpec& spec) {
  std::vector<std::size_t> out;
  for (const auto& y : spec.y) out.push_back(*f.column_index(y));
  return out;
}

void legend(Canvas& c, const std::vector<std::pair<std::string, const char*>>& entries, const std::string& heading) {
  double x = c.right + 16, y = c.top + 8;
  if (!heading.empty()) {
    c.text(x, y, heading, "start", 11, " font-weight=\"bold\"");
    y += 16;
  }
  for (const auto& [name, color] : entries) {
    c.rect(x, y - 9, 10, 10, color);
    c.text(x + 15, y, name, "start", 10);
    y += 15;
  }
}

std::string render_bars(const ChartSpec& spec, const ResultFrame& f) {
  Canvas c;
  auto xi = *f.column_index(spec.x);
  auto ys = y_indices(f, spec);
  if (ys.size() > 1) c.right = Canvas::W - 140;
  auto [lo, hi] = value_range(f, ys);
  auto a = nice_axis(lo, hi, true);
  c.bottom = Canvas::H - 95;
  c.y_axis(a);
  c.line(c.left, c.bottom, c.right, c.bottom);
  double slot = (c.right - c.left) / static_cast<double>(f.row_count());
  double group = slot * 0.8;
  double bar = group / static_cast<double>(ys.size());
  for (std::size_t i = 0; i < f.row_count(); ++i) {
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const auto& v = f.rows[i][ys[k]];
      if (is_null(v)) continue;
      double val = number_of(v);
      double y0 = c.sy(a, 0), y1 = c.sy(a, val);
      double x = c.left + slot * static_cast<double>(i) + slot * 0.1 + bar * static_cast<double>(k);
      c.rect(x, std::min(y0, y1), bar, std::fabs(y0 - y1), kPalette[k % 8]);
    }
  }
  category_ticks(c, f, xi, slot, true);
  c.labels(spec, spec.x, join_names(spec.y));
  if (ys.size() > 1) {
    std::vector<std::pair<std::string, const char*>> entries;
    for (std::size_t k = 0; k < ys.size(); ++k) entries.emplace_back(spec.y[k], kPalette[k % 8]);
    legend(c, entries, "");
  }
  return c.finish();
}

std::string render_hbars(const ChartSpec& spec, const ResultFrame& f) {
  Canvas c;
  c.left = 160;
  auto xi = *f.column_index(spec.x);
  auto yi = *f.column_index(spec.y.front());
  auto [lo, hi] = value_range(f, {yi});
  auto a = nice_axis(lo, hi, true);
  c.x_axis(a);
  c.line(c.left, c.top, c.left, c.bottom);
  double slot = (c.bottom - c.top) / static_cast<double>(f.row_count());
  for (std::size_t i = 0; i < f.row_count(); ++i) {
    double y = c.top + slot * static_cast<double>(i);
    c.text(c.left - 7, y + slot / 2 + 4, label_of(f.rows[i][xi]), "end", 10);
    const auto& v = f.rows[i][yi];
    if (is_null(v)) continue;
    double x0 = c.sx(a, 0), x1 = c.sx(a, number_of(v));
    c.rect(std::min(x0, x1), y + slot * 0.1, std::fabs(x1 - x0), slot * 0.8, kPalette[0]);
  }
  c.labels(spec, spec.y.front(), spec.x);
  return c.finish();
}

std::string render_line(const ChartSpec& spec, const ResultFrame& f) {
  Canvas c;
  auto xi = *f.column_index(spec.x);
  auto ys = y_indices(f, spec);
  if (ys.size() > 1) c.right = Canvas::W - 140;
  auto [lo, hi] = value_range(f, ys);
  auto a = nice_axis(lo, hi, true);
  c.bottom = Canvas::H - 95;
  c.y_axis(a);
  c.line(c.left, c.bottom, c.right, c.bottom);
  double slot = (c.right - c.left) / static_cast<double>(f.row_count());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    std::string points;
    for (std::size_t i = 0; i < f.row_count(); ++i) {
      const auto& v = f.rows[i][ys[k]];
      if (is_null(v)) continue;
      if (!points.empty()) points += " ";
      points += num(c.left + slot * (static_cast<double>(i) + 0.5)) + "," + num(c.sy(a, number_of(v)));
    }
    c.body += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[k % 8]) + "\" stroke-width=\"2\" points=\"" +
              points + "\"/>\n";
    for (std::size_t i = 0; i < f.row_count(); ++i) {
      const auto& v = f.rows[i][ys[k]];
      if (!is_null(v)) c.circle(c.left + slot * (static_cast<double>(i) + 0.5), c.sy(a, number_of(v)), 3, kPalette[k % 8]);
    }
  }
  category_ticks(c, f, xi, slot, true);
  c.labels(spec, spec.x, join_names(spec.y));
  if (ys.size() > 1) {
    std::vector<std::pair<std::string, const char*>> entries;
    for (std::size_t k = 0; k < ys.size(); ++k) entries.emplace_back(spec.y[k], kPalette[k % 8]);
    legend(c, entries, "");
  }
  return c.finish();
}

std::string render_scatter(const ChartSpec& spec, const ResultFrame& f) {
  Canvas c;
  auto xi = *f.column_index(spec.x);
  auto yi = *f.column_index(spec.y.front());
  std::optional<std::size_t> ci;
  if (!spec.color.empty()) {
    ci = f.column_index(spec.color);
    c.right = Canvas::W - 140;
  }
  auto [xlo, xhi] = value_range(f, {xi});
  auto [ylo, yhi] = value_range(f, {yi});
  auto ax = nice_axis(xlo, xhi, false);
  auto ay = nice_axis(ylo, yhi, false);
  c.y_axis(ay);
  c.x_axis(ax);
  std::vector<Value> levels;
  if (ci) {
    for (const auto& r : f.rows)
      if (std::none_of(levels.begin(), levels.end(), [&](const Value& v) { return compare_values(v, r[*ci]) == 0; }))
        levels.push_back(r[*ci]);
    std::sort(levels.begin(), levels.end(), [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
  }
  auto color_of = [&](const Row& r) -> const char* {
    if (!ci) return kPalette[0];
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (compare_values(levels[k], r[*ci]) == 0) return kPalette[k % 8];
    return kPalette[0];
  };
  for (const auto& r : f.rows) {
    if (is_null(r[xi]) || is_null(r[yi])) continue;
    c.circle(c.sx(ax, number_of(r[xi])), c.sy(ay, number_of(r[yi])), 5, color_of(r));
  }
  c.labels(spec, spec.x, spec.y.front());
  if (ci) {
    std::vector<std::pair<std::string, const char*>> entries;
    for (std::size_t k = 0; k < levels.size(); ++k) entries.emplace_back(label_of(levels[k]), kPalette[k % 8]);
    legend(c, entries, spec.color);
  }
  return c.finish();
}

void check_against(const ChartSpec& spec, const ResultFrame& f) {
  auto need = [&](const std::string& name, const char* role) -> const ColumnSpec& {
    auto idx = f.column_index(name);
    if (!idx) throw Error(ErrorCode::Render, std::string("chart ") + role + " column '" + name + "' is not in the data");
    return f.columns[*idx];
  };
  if (spec.x.empty()) throw Error(ErrorCode::Render, "chart has no x column");
  if (spec.y.empty()) throw Error(ErrorCode::Render, "chart has no y column");
  const auto& x = need(spec.x, "x");
  for (const auto& y : spec.y)
    if (!is_numeric(need(y, "y").type)) throw Error(ErrorCode::Render, "chart y column '" + y + "' is not numeric");
  if (!spec.color.empty()) need(spec.color, "color");
  switch (spec.kind) {
    case ChartKind::Scatter:
      if (!is_numeric(x.type)) throw Error(ErrorCode::Render, "scatter needs a numeric x column");
      if (spec.y.size() != 1) throw Error(ErrorCode::Render, "scatter takes exactly one y column");
      break;
    case ChartKind::Bar:
    case ChartKind::HorizontalBar:
      if (spec.y.size() != 1) throw Error(ErrorCode::Render, std::string(to_string(spec.kind)) + " takes one y column");
      break;
    case ChartKind::GroupedBar:
      if (spec.y.size() < 2) throw Error(ErrorCode::Render, "grouped_bar needs at least two y columns");
      break;
    case ChartKind::Line: {
      auto xi = *f.column_index(spec.x);
      std::set<std::string> seen;
      for (const auto& r : f.rows)
        if (!seen.insert(render_value(r[xi])).second)
          throw Error(ErrorCode::Render, "line chart x column '" + spec.x + "' repeats a value");
      break;
    }
  }
}

}  // namespace

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::Line: return "line";
    case ChartKind::Bar: return "bar";
    case ChartKind::HorizontalBar: return "horizontal_bar";
    case ChartKind::Scatter: return "scatter";
    case ChartKind::GroupedBar: return "grouped_bar";
  }
  return "?";
}

ChartKind chart_kind_from_string(std::string_view name) {
  for (auto k : {ChartKind::Line, ChartKind::Bar, ChartKind::HorizontalBar, ChartKind::Scatter, ChartKind::GroupedBar})
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::Parse, "unknown chart kind '" + std::string(name) + "'");
}

std::string_view to_string(VizReason reason) {
  switch (reason) {
    case VizReason::ExplicitRequest: return "explicit_request";
    case VizReason::TemporalSeries: return "temporal_series";
    case VizReason::LongRanking: return "long_ranking";
    case VizReason::None: return "none";
  }
  return "?";
}

std::string chart_spec_to_json(const ChartSpec& spec) {
  json j{{"schema_version", spec.schema_version},
         {"kind", std::string(to_string(spec.kind))},
         {"x", spec.x},
         {"y", spec.y},
         {"color", spec.color.empty() ? json(nullptr) : json(spec.color)},
         {"title", spec.title},
         {"data", spec.data},
         {"source_sql", spec.source_sql}};
  return j.dump();
}

ChartSpec chart_spec_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("chart spec is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "chart spec must be an object");
  ChartSpec s;
  try {
    s.schema_version = j.value("schema_version", kChartSpecVersion);
    if (s.schema_version != kChartSpecVersion)
      throw Error(ErrorCode::Parse, "unsupported chart spec version " + std::to_string(s.schema_version));
    s.kind = chart_kind_from_string(j.at("kind").get<std::string>());
    s.x = j.at("x").get<std::string>();
    const auto& y = j.at("y");
    if (y.is_string()) s.y = {y.get<std::string>()};
    else s.y = y.get<std::vector<std::string>>();
    if (j.contains("color") && !j["color"].is_null()) s.color = j["color"].get<std::string>();
    s.title = j.value("title", "");
    s.data = j.value("data", "");
    s.source_sql = j.value("source_sql", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("chart spec field error: ") + e.what());
  }
  return s;
}

void check_chart_spec(const ChartSpec& spec) {
  ResultFrame f;
  try {
    f = parse_canonical(spec.data);
  } catch (const Error& e) {
    throw Error(ErrorCode::Render, std::string("chart data does not parse: ") + e.what());
  }
  check_against(spec, f);
}

VizDecision should_visualize(std::string_view question, const ResultFrame& frame, std::string_view sql_text) {
  VizDecision d;
  bool explicit_request =
      std::any_of(std::begin(kExplicitWords), std::end(kExplicitWords), [&](const char* w) { return contains_word(question, w); });
  auto temporal = temporal_column(frame);
  bool temporal_series = temporal && !value_columns(frame, frame.columns[*temporal].name).empty();
  bool ranking = is_ranking(frame, top_k_shape(sql_text) ? kTopKRankingRows : kRankingRows);

  ChartKind structural = ChartKind::Bar;
  if (temporal_series) structural = ChartKind::Line;
  else if (ranking) structural = ChartKind::HorizontalBar;
  else if (value_columns(frame).size() >= 2 && !first_text_column(frame)) structural = ChartKind::Scatter;

  if (explicit_request) {
    d = {true, VizReason::ExplicitRequest, explicit_kind(question).value_or(structural)};
  } else if (temporal_series) {
    d = {true, VizReason::TemporalSeries, ChartKind::Line};
  } else if (ranking) {
    d = {true, VizReason::LongRanking, ChartKind::HorizontalBar};
  }
  return d;
}

std::optional<ChartSpec> fallback_chart_spec(std::string_view question, const ResultFrame& frame,
                                             const VizDecision& decision, std::string_view source_sql) {
  if (!decision.should_plot || frame.row_count() == 0) return std::nullopt;
  ChartSpec s;
  s.kind = decision.suggested_kind;
  s.title = collapse_whitespace(trim(question));
  s.data = canonical_bytes(frame);
  s.source_sql = std::string(source_sql);

  auto text_col = first_text_column(frame);
  auto temporal = temporal_column(frame);
  auto category = [&]() -> std::optional<std::size_t> {
    if (s.kind == ChartKind::Line && temporal) return temporal;
    if (text_col) return text_col;
    return temporal;
  }();

  if (s.kind == ChartKind::Scatter) {
    auto values = value_columns(frame);
    if (values.size() < 2) {
      s.kind = ChartKind::Bar;
    } else {
      s.x = frame.columns[values[0]].name;
      s.y = {frame.columns[values[1]].name};
      if (values.size() >= 3) s.color = frame.columns[values[2]].name;
      return s;
    }
  }
  if (!category) category = 0;
  const auto& x = frame.columns[*category].name;
  auto values = value_columns(frame, x);
  if (values.empty()) return std::nullopt;
  s.x = x;
  if (s.kind == ChartKind::GroupedBar) {
    for (auto v : values) s.y.push_back(frame.columns[v].name);
    if (s.y.size() < 2) s.kind = ChartKind::Bar;
  }
  if (s.kind != ChartKind::GroupedBar) s.y = {frame.columns[values.front()].name};
  if (s.kind == ChartKind::Line) {
    try {
      check_against(s, frame);
    } catch (const Error&) {
      s.kind = ChartKind::Bar;
    }
  }
  return s;
}

CompletionRequest build_chart_prompt(std::string_view question, const ResultFrame& frame, const VizDecision& decision,
                                     const PromptTemplate& tmpl) {
  std::string columns;
  for (const auto& c : frame.columns) columns += "- " + c.name + " (" + std::string(to_string(c.type)) + ")\n";
  if (!columns.empty()) columns.pop_back();
  PromptVars vars{{"question", std::string(trim(question))},
                  {"suggested_kind", std::string(to_string(decision.suggested_kind))},
                  {"columns", columns},
                  {"row_count", std::to_string(frame.row_count())}};
  CompletionRequest req;
  req.tag = PromptTag::ChartGen;
  req.template_version = tmpl.version_tag();
  req.system_prompt = render_prompt(tmpl.system, vars);
  req.user_prompt = render_prompt(tmpl.user, vars);
  return req;
}

ChartBuild build_chart_spec(std::string_view question, const ResultFrame& frame, const VizDecision& decision,
                            const Gateway* gateway, const PromptTemplate* tmpl, std::string_view source_sql) {
  ChartBuild out;
  if (!decision.should_plot) return out;
  if (gateway && tmpl && gateway->has_provider()) {
    try {
      auto completion = gateway->complete(build_chart_prompt(question, frame, decision, *tmpl));
      auto spec = chart_spec_from_json(completion.text);
      bool has_data = !spec.data.empty();
      if (!has_data) spec.data = canonical_bytes(frame);
      if (spec.title.empty()) spec.title = collapse_whitespace(trim(question));
      spec.source_sql = std::string(source_sql);
      check_against(spec, frame);
      out.spec = std::move(spec);
      out.from_model = true;
      return out;
    } catch (const Error& e) {
      out.warnings.push_back(std::string("chart spec fallback: ") + e.what());
    }
  }
  out.spec = fallback_chart_spec(question, frame, decision, source_sql);
  if (!out.spec) out.warnings.push_back("chart omitted: no plottable columns");
  return out;
}

ChartValidation validate_chart_data(const ChartSpec& spec, const ResultFrame& frame) {
  return spec.data == canonical_bytes(frame) ? ChartValidation::Valid : ChartValidation::Mismatch;
}

SettledChart settle_chart(ChartSpec spec, ResultFrame frame, const std::function<ResultFrame()>& requery,
                          const std::function<std::optional<ChartSpec>(const ResultFrame&)>& rebuild) {
  SettledChart out;
  if (validate_chart_data(spec, frame) == ChartValidation::Valid) {
    out.spec = std::move(spec);
    out.frame = std::move(frame);
    return out;
  }
  out.requeries = 1;
  out.warnings.push_back("chart data did not match the query result; re-queried");
  out.frame = requery();
  auto rebuilt = rebuild(out.frame);
  if (rebuilt && validate_chart_data(*rebuilt, out.frame) == ChartValidation::Valid) {
    out.spec = std::move(rebuilt);
    return out;
  }
  out.warnings.push_back("chart omitted: data still mismatched after re-query");
  return out;
}

std::string render_svg(const ChartSpec& spec) {
  ResultFrame f;
  try {
    f = parse_canonical(spec.data);
  } catch (const Error& e) {
    throw Error(ErrorCode::Render, std::string("chart data does not parse: ") + e.what());
  }
  if (f.row_count() == 0) throw Error(ErrorCode::Render, "no rows");
  check_against(spec, f);
  switch (spec.kind) {
    case ChartKind::Line: return render_line(spec, f);
    case ChartKind::Bar:
    case ChartKind::GroupedBar: return render_bars(spec, f);
    case ChartKind::HorizontalBar: return render_hbars(spec, f);
    case ChartKind::Scatter: return render_scatter(spec, f);
  }
  throw Error(ErrorCode::Render, "unknown chart kind");
}

}  // namespace dsqa
