#include "dsqa/value.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "dsqa/error.hpp"

namespace dsqa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Tier: return "tier";
    case ErrorCode::Row: return "row";
    case ErrorCode::Session: return "session";
    case ErrorCode::NotMaterialized: return "not_materialized";
    case ErrorCode::Busy: return "busy";
    case ErrorCode::Ingest: return "ingest";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Config: return "config";
    case ErrorCode::MockMiss: return "mock_miss";
    case ErrorCode::Provider: return "provider";
    case ErrorCode::Storage: return "storage";
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::UnknownIdentifier: return "unknown_identifier";
    case ErrorCode::ReadOnly: return "read_only";
    case ErrorCode::MultipleStatements: return "multiple_statements";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Resolution: return "resolution";
    case ErrorCode::Planning: return "planning";
    case ErrorCode::Execution: return "execution";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::Render: return "render";
    case ErrorCode::Template: return "template";
    case ErrorCode::Instantiation: return "instantiation";
    case ErrorCode::Annotation: return "annotation";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::UndefinedGold: return "undefined_gold";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Integer: return "integer";
    case ColumnType::Real: return "real";
    case ColumnType::Text: return "text";
    case ColumnType::Boolean: return "boolean";
  }
  return "text";
}

std::optional<ColumnType> column_type_from_string(std::string_view name) {
  if (name == "integer") return ColumnType::Integer;
  if (name == "real") return ColumnType::Real;
  if (name == "text") return ColumnType::Text;
  if (name == "boolean") return ColumnType::Boolean;
  return std::nullopt;
}

std::string render_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string render_value(const Value& v) {
  struct Visitor {
    std::string operator()(Null) const { return std::string(kNullToken); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return render_real(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, v);
}

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\x1f': out += "\\u"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '\\' || i + 1 == text.size()) {
      out += c;
      continue;
    }
    char n = text[++i];
    switch (n) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'u': out += '\x1f'; break;
      default:
        out += '\\';
        out += n;
    }
  }
  return out;
}

Value parse_value(std::string_view text, ColumnType type) {
  if (text == kNullToken) return Null{};
  auto fail = [&] {
    return Error(ErrorCode::Parse,
                 "invalid " + std::string(to_string(type)) + " value '" + std::string(text) + "'");
  };
  switch (type) {
    case ColumnType::Integer: {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || ptr != text.data() + text.size()) throw fail();
      return out;
    }
    case ColumnType::Real: {
      if (text == "nan") return std::nan("");
      if (text == "inf") return HUGE_VAL;
      if (text == "-inf") return -HUGE_VAL;
      double out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || ptr != text.data() + text.size()) throw fail();
      return out;
    }
    case ColumnType::Boolean:
      if (text == "true") return true;
      if (text == "false") return false;
      throw fail();
    case ColumnType::Text:
      return unescape_field(text);
  }
  throw fail();
}

bool value_fits(const Value& v, ColumnType type) {
  if (is_null(v)) return true;
  switch (type) {
    case ColumnType::Integer: return std::holds_alternative<std::int64_t>(v);
    case ColumnType::Real:
      return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
    case ColumnType::Text: return std::holds_alternative<std::string>(v);
    case ColumnType::Boolean: {
      if (std::holds_alternative<bool>(v)) return true;
      if (const auto* i = std::get_if<std::int64_t>(&v)) return *i == 0 || *i == 1;
      return false;
    }
  }
  return false;
}

Value coerce_value(const Value& v, ColumnType type) {
  if (is_null(v)) return v;
  switch (type) {
    case ColumnType::Real:
      if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
      return v;
    case ColumnType::Boolean:
      if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
      return v;
    case ColumnType::Text:
      if (!std::holds_alternative<std::string>(v)) return render_value(v);
      return v;
    case ColumnType::Integer:
      if (const auto* b = std::get_if<bool>(&v)) return static_cast<std::int64_t>(*b ? 1 : 0);
      return v;
  }
  return v;
}

std::string_view value_type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "null";
    case 1: return "integer";
    case 2: return "real";
    case 3: return "text";
    case 4: return "boolean";
  }
  return "unknown";
}

std::optional<double> as_number(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  return std::nullopt;
}

int compare_values(const Value& a, const Value& b) {
  auto rank = [](const Value& v) { return is_null(v) ? 0 : std::holds_alternative<std::string>(v) ? 2 : 1; };
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return 0;
  if (ra == 2) {
    int c = std::get<std::string>(a).compare(std::get<std::string>(b));
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  const auto* ia = std::get_if<std::int64_t>(&a);
  const auto* ib = std::get_if<std::int64_t>(&b);
  if (ia && ib) return *ia < *ib ? -1 : *ia > *ib ? 1 : 0;
  double x = *as_number(a), y = *as_number(b);
  return x < y ? -1 : x > y ? 1 : 0;
}

}  // namespace dsqa
