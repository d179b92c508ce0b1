#pragma once

#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/executor.hpp"
#include "dsqa/frame.hpp"
#include "dsqa/value.hpp"

namespace dsqa::detail {

using json = nlohmann::json;

inline json value_to_json(const Value& v) {
  switch (v.index()) {
    case 1: return std::get<std::int64_t>(v);
    case 2: return std::get<double>(v);
    case 3: return std::get<std::string>(v);
    case 4: return std::get<bool>(v);
    default: return nullptr;
  }
}

inline Value value_from_json(const json& j) {
  if (j.is_null()) return Null{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorCode::Parse, "unsupported JSON value " + j.dump());
}

inline json frame_to_json(const ResultFrame& f) {
  json cols = json::array();
  for (const auto& c : f.columns) cols.push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}});
  json rows = json::array();
  for (const auto& r : f.rows) {
    json row = json::array();
    for (const auto& v : r) row.push_back(value_to_json(v));
    rows.push_back(std::move(row));
  }
  return {{"columns", cols}, {"rows", rows}};
}

/// Answers carry canonical text next to structured values so consumers never
/// have to re-derive either.
inline json answer_to_json(const AnswerValue& a) {
  json j{{"type", std::string(to_string(a.kind))}, {"text", a.text()}};
  if (a.kind == AnswerType::Scalar) {
    j["value"] = value_to_json(a.scalar);
  } else {
    auto t = frame_to_json(a.table);
    j["columns"] = t["columns"];
    j["rows"] = t["rows"];
    j["shape_mismatch"] = a.shape_mismatch;
  }
  return j;
}

/// Inverse of answer_to_json; scalars are rebuilt from `value`, tables from
/// the canonical text.
inline AnswerValue answer_from_json(const json& j) {
  AnswerValue a;
  a.kind = answer_type_from_string(j.at("type").get<std::string>());
  if (a.kind == AnswerType::Scalar) {
    a.scalar = value_from_json(j.at("value"));
  } else {
    a.table = parse_canonical(j.at("text").get<std::string>());
    a.shape_mismatch = j.value("shape_mismatch", false);
  }
  return a;
}

}  // namespace dsqa::detail
