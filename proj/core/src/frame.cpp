#include "dsqa/frame.hpp"

#include <algorithm>
#include <sstream>

#include "dsqa/error.hpp"

namespace dsqa {

namespace {

constexpr char kUnitSep = '\x1f';

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

ColumnType infer_type(const std::vector<Row>& rows, std::size_t col,
                      std::optional<ColumnType> declared) {
  bool any_int = false, any_real = false, any_text = false, any_bool = false;
  bool declared_fits = true;
  for (const auto& row : rows) {
    const Value& v = row[col];
    if (is_null(v)) continue;
    if (declared && !value_fits(v, *declared)) declared_fits = false;
    switch (v.index()) {
      case 1: any_int = true; break;
      case 2: any_real = true; break;
      case 3: any_text = true; break;
      case 4: any_bool = true; break;
    }
  }
  if (declared && declared_fits) return *declared;
  if (any_text) return ColumnType::Text;
  if (any_bool && !any_int && !any_real) return ColumnType::Boolean;
  if (any_bool) return ColumnType::Text;
  if (any_real) return ColumnType::Real;
  if (any_int) return ColumnType::Integer;
  return declared.value_or(ColumnType::Text);
}

}  // namespace

std::optional<std::size_t> ResultFrame::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  return std::nullopt;
}

ResultFrame make_frame(std::vector<std::string> names,
                       const std::vector<std::optional<ColumnType>>& declared,
                       std::vector<Row> rows) {
  ResultFrame frame;
  frame.columns.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::optional<ColumnType> decl = c < declared.size() ? declared[c] : std::nullopt;
    ColumnType type = infer_type(rows, c, decl);
    frame.columns.push_back({std::move(names[c]), type});
  }
  for (auto& row : rows) {
    if (row.size() != frame.columns.size())
      throw Error(ErrorCode::Execution, "row arity does not match column count");
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = coerce_value(row[c], frame.columns[c].type);
  }
  frame.rows = std::move(rows);
  return frame;
}

std::string canonical_bytes(const ResultFrame& frame) {
  std::string out;
  for (std::size_t c = 0; c < frame.columns.size(); ++c) {
    if (c) out += kUnitSep;
    out += escape_field(frame.columns[c].name);
    out += ':';
    out += to_string(frame.columns[c].type);
  }
  out += '\n';
  for (const auto& row : frame.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += kUnitSep;
      if (is_null(row[c])) {
        out += kNullToken;
      } else {
        out += escape_field(render_value(row[c]));
      }
    }
    out += '\n';
  }
  return out;
}

ResultFrame parse_canonical(std::string_view bytes) {
  if (bytes.empty() || bytes.back() != '\n')
    throw Error(ErrorCode::Parse, "canonical frame must end with a newline");
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto pos = bytes.find('\n', start);
    lines.push_back(bytes.substr(start, pos - start));
    start = pos + 1;
  }
  ResultFrame frame;
  if (!lines.front().empty()) {
    for (auto field : split(lines.front(), kUnitSep)) {
      auto colon = field.rfind(':');
      if (colon == std::string_view::npos)
        throw Error(ErrorCode::Parse, "header field without type: " + std::string(field));
      auto type = column_type_from_string(field.substr(colon + 1));
      if (!type) throw Error(ErrorCode::Parse, "unknown column type in header: " + std::string(field));
      frame.columns.push_back({unescape_field(field.substr(0, colon)), *type});
    }
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split(lines[i], kUnitSep);
    if (frame.columns.empty() && lines[i].empty()) {
      frame.rows.emplace_back();
      continue;
    }
    if (fields.size() != frame.columns.size())
      throw Error(ErrorCode::Parse, "row " + std::to_string(i - 1) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(frame.columns.size()));
    Row row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_value(fields[c], frame.columns[c].type));
    frame.rows.push_back(std::move(row));
  }
  return frame;
}

bool same_content(const ResultFrame& a, const ResultFrame& b) {
  return canonical_bytes(a) == canonical_bytes(b);
}

std::string render_text_table(const ResultFrame& frame, std::size_t max_rows) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> widths(frame.columns.size(), 0);
  std::vector<std::string> header;
  for (std::size_t c = 0; c < frame.columns.size(); ++c) {
    header.push_back(frame.columns[c].name);
    widths[c] = header.back().size();
  }
  std::size_t shown = std::min(max_rows, frame.rows.size());
  for (std::size_t r = 0; r < shown; ++r) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < frame.columns.size(); ++c) {
      line.push_back(is_null(frame.rows[r][c]) ? "NULL" : render_value(frame.rows[r][c]));
      widths[c] = std::max(widths[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) os << "  ";
      os << line[c];
      if (c + 1 < line.size()) os << std::string(widths[c] - line[c].size(), ' ');
    }
    os << '\n';
  };
  emit(header);
  for (const auto& line : cells) emit(line);
  if (shown < frame.rows.size()) os << "... (" << frame.rows.size() - shown << " more rows)\n";
  return os.str();
}

}  // namespace dsqa
