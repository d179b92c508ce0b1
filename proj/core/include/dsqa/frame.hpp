#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/value.hpp"

namespace dsqa {

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::Text;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct Provenance {
  std::string sql;
  std::string snapshot_id;
  std::uint64_t session_id = 0;
  std::vector<std::string> materialized_tables;
};

/// Ordered, typed, named-column table. Every row has one value per column and
/// every non-null value matches its column type.
struct ResultFrame {
  std::vector<ColumnSpec> columns;
  std::vector<Row> rows;
  Provenance provenance;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
};

/// Builds a frame from untyped engine output. Declared types win when every
/// value fits them; otherwise the column type is inferred (integer+real
/// promotes to real, anything mixed with text becomes text) and values are
/// coerced.
ResultFrame make_frame(std::vector<std::string> names,
                       const std::vector<std::optional<ColumnType>>& declared,
                       std::vector<Row> rows);

/// Canonical wire form: a header line of `name:type` fields, then one line per
/// row in frame order. Fields are separated by U+001F and escaped with
/// escape_field; every line ends with '\n'. Provenance is not included.
std::string canonical_bytes(const ResultFrame& frame);

/// Inverse of canonical_bytes. Throws Error(Parse) on malformed input.
ResultFrame parse_canonical(std::string_view bytes);

/// Content equality (columns and rows, not provenance).
bool same_content(const ResultFrame& a, const ResultFrame& b);

/// Plain-text grid for terminal output.
std::string render_text_table(const ResultFrame& frame, std::size_t max_rows = 50);

}  // namespace dsqa
