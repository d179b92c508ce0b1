#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dsqa {

enum class ColumnType { Integer, Real, Text, Boolean };

std::string_view to_string(ColumnType type);
std::optional<ColumnType> column_type_from_string(std::string_view name);

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

/// A single cell. Booleans are kept distinct from integers so that they
/// render as `true`/`false` in canonical form.
using Value = std::variant<Null, std::int64_t, double, std::string, bool>;
using Row = std::vector<Value>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }

/// Reserved token for NULL in canonical serialization.
inline constexpr std::string_view kNullToken = "\\N";

/// Shortest decimal text that round-trips to the same double. Always contains
/// a '.', an exponent, or is a non-finite token, so reals never collide with
/// integers in canonical form.
std::string render_real(double v);

/// Canonical text for one value (unescaped; NULL becomes kNullToken).
std::string render_value(const Value& v);

/// Escapes backslash, newline, carriage return and the unit separator.
std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);

/// Parses canonical text back into a value of the given column type.
/// Throws Error(Parse) when the text is not a valid rendering.
Value parse_value(std::string_view text, ColumnType type);

/// Whether `v` may be stored in a column of type `type` (NULL always fits).
bool value_fits(const Value& v, ColumnType type);

/// Lossless conversion used when a column promotes (integer -> real, etc.).
Value coerce_value(const Value& v, ColumnType type);

std::string_view value_type_name(const Value& v);

/// Total order used for sorting: NULL < numbers (integers, reals and booleans
/// compared numerically) < text. Returns <0, 0 or >0.
int compare_values(const Value& a, const Value& b);

/// Numeric view of a value, if it has one.
std::optional<double> as_number(const Value& v);

}  // namespace dsqa
