#include "dsqa/benchgen.hpp"

#include <algorithm>
#include <cstdio>
#include <cctype>
#include <cerrno>
#include <random>
#include <set>

#include "json_util.hpp"

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using detail::json;

[[noreturn]] void template_error(const std::string& id, std::size_t line, const std::string& msg) {
  std::string where = id.empty() ? "template pack" : "template " + id;
  if (line) where += " (line " + std::to_string(line) + ")";
  throw Error(ErrorCode::Template, where + ": " + msg);
}

bool valid_slot_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !std::isdigit(static_cast<unsigned char>(name[0]));
}

std::int64_t parse_int(std::string_view s, const std::string& id, std::size_t line) {
  auto t = std::string(trim(s));
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || errno || *end) template_error(id, line, "bad integer '" + t + "'");
  return v;
}

// `name:kind args` from inside the braces.
SlotDecl parse_slot_decl(std::string_view body, const std::string& id, std::size_t line) {
  SlotDecl slot;
  auto colon = body.find(':');
  slot.name = std::string(trim(body.substr(0, colon)));
  if (!valid_slot_name(slot.name)) template_error(id, line, "bad slot name '" + slot.name + "'");
  auto spec = std::string(trim(body.substr(colon + 1)));
  auto space = spec.find(' ');
  auto kind = spec.substr(0, space);
  auto args = space == std::string::npos ? std::string() : std::string(trim(std::string_view(spec).substr(space)));
  if (kind == "player") {
    slot.kind = SlotKind::Player;
    if (!args.empty()) {
      static const std::set<std::string> kPositions{"GKP", "DEF", "MID", "FWD"};
      if (!kPositions.count(args)) template_error(id, line, "unknown position '" + args + "'");
      slot.position = args;
    }
  } else if (kind == "team") {
    slot.kind = SlotKind::Team;
    if (!args.empty()) template_error(id, line, "team slots take no arguments");
  } else if (kind == "int") {
    slot.kind = SlotKind::Int;
    auto dots = args.find("..");
    if (dots == std::string::npos) template_error(id, line, "int slot needs lo..hi");
    slot.lo = parse_int(std::string_view(args).substr(0, dots), id, line);
    slot.hi = parse_int(std::string_view(args).substr(dots + 2), id, line);
    if (slot.lo > slot.hi) template_error(id, line, "empty int range for " + slot.name);
  } else if (kind == "choice") {
    slot.kind = SlotKind::Choice;
    std::size_t start = 0;
    while (start <= args.size()) {
      auto bar = args.find('|', start);
      auto item = std::string(trim(std::string_view(args).substr(start, bar - start)));
      auto eq = item.find('=');
      std::string label = std::string(trim(std::string_view(item).substr(0, eq)));
      std::string value = eq == std::string::npos ? label : std::string(trim(std::string_view(item).substr(eq + 1)));
      if (label.empty() || value.empty()) template_error(id, line, "empty choice in " + slot.name);
      slot.choices.emplace_back(label, value);
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
  } else {
    template_error(id, line, "unknown slot kind '" + kind + "'");
  }
  return slot;
}

struct Placeholder {
  std::size_t begin = 0, end = 0;  // [begin, end) including braces
  std::string name;
  std::string field;  // "", "id" or "sql"
  std::optional<std::string> decl;  // text after ':' when declared inline
};

std::vector<Placeholder> scan_placeholders(std::string_view text, const std::string& id, std::size_t line) {
  std::vector<Placeholder> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    auto close = text.find('}', pos);
    if (close == std::string_view::npos) template_error(id, line, "unclosed '{'");
    Placeholder p;
    p.begin = pos;
    p.end = close + 1;
    auto body = text.substr(pos + 1, close - pos - 1);
    auto colon = body.find(':');
    if (colon != std::string_view::npos) {
      p.name = std::string(trim(body.substr(0, colon)));
      p.decl = std::string(body);
    } else {
      auto name = std::string(trim(body));
      auto dot = name.find('.');
      if (dot != std::string::npos) {
        p.field = name.substr(dot + 1);
        name = name.substr(0, dot);
        if (p.field != "id" && p.field != "sql") template_error(id, line, "unknown field '." + p.field + "'");
      }
      p.name = name;
    }
    if (!valid_slot_name(p.name)) template_error(id, line, "bad placeholder '" + std::string(body) + "'");
    out.push_back(std::move(p));
    pos = close + 1;
  }
  return out;
}

void finish_template(QuestionTemplate& t) {
  const auto& id = t.template_id;
  if (t.base_text.empty()) template_error(id, t.line, "missing question");
  if (t.rephrasings.size() != 3)
    template_error(id, t.line, "expected 3 rephrasings, found " + std::to_string(t.rephrasings.size()));
  if (t.gold_sql_template.empty()) template_error(id, t.line, "missing sql");

  for (const auto& p : scan_placeholders(t.base_text, id, t.line)) {
    auto known = std::find_if(t.slots.begin(), t.slots.end(), [&](const SlotDecl& s) { return s.name == p.name; });
    if (p.decl) {
      if (known != t.slots.end()) template_error(id, t.line, "slot '" + p.name + "' declared twice");
      t.slots.push_back(parse_slot_decl(*p.decl, id, t.line));
    } else if (known == t.slots.end()) {
      if (p.name == "player" || p.name == "team") {
        t.slots.push_back(parse_slot_decl(p.name + ":" + p.name, id, t.line));
      } else {
        template_error(id, t.line, "slot '" + p.name + "' used before its declaration");
      }
    }
    if (!p.field.empty()) template_error(id, t.line, "fields are only allowed in sql");
  }

  auto check_refs = [&](const std::string& text, bool sql, bool need_all) {
    std::set<std::string> seen;
    for (const auto& p : scan_placeholders(text, id, t.line)) {
      if (p.decl) template_error(id, t.line, "slots are declared in the question only");
      auto slot = std::find_if(t.slots.begin(), t.slots.end(), [&](const SlotDecl& s) { return s.name == p.name; });
      if (slot == t.slots.end()) template_error(id, t.line, "undeclared slot '" + p.name + "'");
      if (!sql && !p.field.empty()) template_error(id, t.line, "fields are only allowed in sql");
      if (p.field == "id" && slot->kind != SlotKind::Player && slot->kind != SlotKind::Team)
        template_error(id, t.line, "'" + p.name + ".id' needs a player or team slot");
      seen.insert(p.name);
    }
    if (need_all)
      for (const auto& s : t.slots)
        if (!seen.count(s.name)) template_error(id, t.line, "rephrasing does not mention slot '" + s.name + "'");
  };
  std::set<std::string> distinct{ascii_lower(collapse_whitespace(t.base_text))};
  for (const auto& r : t.rephrasings) {
    check_refs(r, false, true);
    if (!distinct.insert(ascii_lower(collapse_whitespace(r))).second)
      template_error(id, t.line, "rephrasings must differ from each other and from the question");
  }
  check_refs(t.gold_sql_template, true, false);
}

std::uint64_t slot_seed(const std::string& template_id, const std::string& slot) {
  auto hex = sha256_hex(template_id + "/" + slot);
  return std::stoull(hex.substr(0, 16), nullptr, 16);
}

std::string sql_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string format_item_id(const std::string& template_id, std::size_t instance, int rephrasing) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%03zu-r%d", instance, rephrasing);
  return template_id + buf;
}

std::vector<std::int64_t> id_list(const json& j, const char* key) {
  std::vector<std::int64_t> out;
  if (j.contains(key))
    for (const auto& v : j.at(key)) out.push_back(v.get<std::int64_t>());
  return out;
}

void fill_analysis(BenchmarkItem& item, const sql::ValidatedSql& v) {
  item.gold_sql = v.text;
  item.primitives = v.primitives;
  item.dependent_tables.assign(v.dependent_tables.begin(), v.dependent_tables.end());
}

// Steps the slot combination, last slot fastest; false after the last one.
bool advance(std::vector<std::size_t>& odometer, const std::vector<std::vector<SlotValue>>& chosen) {
  for (std::size_t s = odometer.size(); s-- > 0;) {
    if (++odometer[s] < chosen[s].size()) return true;
    odometer[s] = 0;
  }
  return false;
}

bool answer_is_empty(const AnswerValue& a) {
  return a.kind == AnswerType::Scalar ? is_null(a.scalar) : a.table.rows.empty();
}

}  // namespace

std::vector<QuestionTemplate> parse_template_pack(std::string_view text) {
  std::vector<QuestionTemplate> out;
  std::set<std::string> ids;
  std::optional<QuestionTemplate> cur;
  std::string* continuation = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  auto flush = [&] {
    if (!cur) return;
    finish_template(*cur);
    out.push_back(std::move(*cur));
    cur.reset();
  };

  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    auto line = trim(raw);
    if (line.empty() || line[0] == '#') {
      continuation = nullptr;
      continue;
    }
    if (line.front() == '[') {
      flush();
      continuation = nullptr;
      if (line.back() != ']' || line.substr(1, 9) != "template ")
        template_error("", line_no, "expected [template <id>]");
      auto id = std::string(trim(line.substr(10, line.size() - 11)));
      if (id.empty() || !std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
        template_error("", line_no, "bad template id '" + id + "'");
      if (!ids.insert(id).second) template_error(id, line_no, "duplicate template id");
      cur.emplace();
      cur->template_id = id;
      cur->line = line_no;
      continue;
    }
    if (!cur) template_error("", line_no, "content outside a [template] section");
    // Indented lines continue the previous value (long SQL).
    if (continuation && (raw.front() == ' ' || raw.front() == '\t')) {
      *continuation += " " + std::string(line);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos) template_error(cur->template_id, line_no, "expected 'key: value'");
    auto key = std::string(trim(line.substr(0, colon)));
    auto value = std::string(trim(line.substr(colon + 1)));
    continuation = nullptr;
    if (key == "answer") {
      if (value == "scalar") cur->answer_type = AnswerType::Scalar;
      else if (value == "table") cur->answer_type = AnswerType::Table;
      else template_error(cur->template_id, line_no, "answer must be scalar or table");
    } else if (key == "question") {
      if (!cur->base_text.empty()) template_error(cur->template_id, line_no, "question given twice");
      cur->base_text = value;
      continuation = &cur->base_text;
    } else if (key == "rephrase") {
      cur->rephrasings.push_back(value);
      continuation = &cur->rephrasings.back();
    } else if (key == "sql") {
      if (!cur->gold_sql_template.empty()) template_error(cur->template_id, line_no, "sql given twice");
      cur->gold_sql_template = value;
      continuation = &cur->gold_sql_template;
    } else {
      template_error(cur->template_id, line_no, "unknown key '" + key + "'");
    }
  }
  flush();
  return out;
}

std::vector<QuestionTemplate> load_template_pack(const std::string& path) { return parse_template_pack(read_file(path)); }

std::vector<SlotValue> slot_domain(const SlotDecl& slot, Store& store) {
  std::vector<SlotValue> out;
  switch (slot.kind) {
    case SlotKind::Player:
    case SlotKind::Team: {
      std::string sql = slot.kind == SlotKind::Player
                            ? "SELECT player_id, web_name FROM players" +
                                  (slot.position.empty() ? std::string() : " WHERE player_position = " + sql_quote(slot.position)) +
                                  " ORDER BY player_id"
                            : "SELECT team_id, team_name FROM teams ORDER BY team_id";
      for (const auto& row : store.query(sql).rows)
        out.push_back({render_value(row[1]), std::get<std::int64_t>(row[0]), render_value(row[1])});
      break;
    }
    case SlotKind::Int:
      for (auto v = slot.lo; v <= slot.hi; ++v) out.push_back({std::to_string(v), std::nullopt, std::to_string(v)});
      break;
    case SlotKind::Choice:
      for (const auto& [label, value] : slot.choices) out.push_back({label, std::nullopt, value});
      break;
  }
  return out;
}

std::vector<SlotValue> sample_slot(const std::string& template_id, const SlotDecl& slot,
                                   const std::vector<SlotValue>& domain, std::size_t values_per_slot) {
  auto k = std::min(values_per_slot, domain.size());
  std::vector<std::size_t> idx(domain.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates on raw engine output; the engine sequence is fixed
  // by the standard, distributions are not.
  std::mt19937_64 rng(slot_seed(template_id, slot.name));
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<SlotValue> out;
  for (auto i : idx) out.push_back(domain[i]);
  return out;
}

std::string fill_placeholders(std::string_view text, const std::vector<SlotDecl>& slots,
                              const std::vector<SlotValue>& values, bool sql_context) {
  std::string out;
  std::size_t last = 0;
  for (const auto& p : scan_placeholders(text, "", 0)) {
    out.append(text.substr(last, p.begin - last));
    last = p.end;
    auto it = std::find_if(slots.begin(), slots.end(), [&](const SlotDecl& s) { return s.name == p.name; });
    if (it == slots.end()) throw Error(ErrorCode::Template, "undeclared slot '" + p.name + "'");
    const auto& v = values.at(static_cast<std::size_t>(it - slots.begin()));
    if (p.field == "id") {
      if (!v.id) throw Error(ErrorCode::Template, "slot '" + p.name + "' has no id");
      out += std::to_string(*v.id);
    } else if (p.field == "sql") {
      out += sql_quote(sql_context ? v.sql_text : v.text);
    } else {
      out += sql_context ? v.sql_text : v.text;
    }
  }
  out.append(text.substr(last));
  return out;
}

AnswerValue author_gold_answer(const BenchmarkItem& item, Store& store, const Executor& executor) {
  try {
    auto validated = sql::validate_sql(item.gold_sql, store.catalog());
    auto session = store.open_session();
    session.player_ids = item.player_ids;
    auto frame = executor.execute(validated, session);
    auto answer = answer_from_frame(frame, item.answer_type);
    if (answer.shape_mismatch)
      throw Error(ErrorCode::Annotation, "gold answer for " + item.item_id + " is not a scalar (" +
                                             std::to_string(frame.row_count()) + "x" +
                                             std::to_string(frame.column_count()) + ")",
                  item.gold_sql);
    return answer;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Annotation) throw;
    throw Error(ErrorCode::Annotation, "gold SQL for " + item.item_id + " failed: " + e.what(), item.gold_sql);
  }
}

std::vector<BenchmarkItem> instantiate(const std::vector<QuestionTemplate>& templates, Store& store,
                                       const Executor& executor, const InstantiateOptions& options) {
  if (options.values_per_slot == 0) throw Error(ErrorCode::Config, "values_per_slot must be positive");
  auto snapshot_id = store.content_id();
  std::vector<BenchmarkItem> out;
  for (const auto& t : templates) {
    std::vector<std::vector<SlotValue>> chosen;
    for (const auto& slot : t.slots) {
      auto domain = slot_domain(slot, store);
      if (domain.empty())
        throw Error(ErrorCode::Instantiation, "template " + t.template_id + ": slot '" + slot.name + "' has no values");
      chosen.push_back(sample_slot(t.template_id, slot, domain, options.values_per_slot));
    }
    std::vector<std::size_t> odometer(t.slots.size(), 0);
    for (std::size_t instance = 1;; ++instance) {
      std::vector<SlotValue> values;
      for (std::size_t s = 0; s < t.slots.size(); ++s) values.push_back(chosen[s][odometer[s]]);

      BenchmarkItem proto;
      proto.template_id = t.template_id;
      proto.answer_type = t.answer_type;
      proto.snapshot_id = snapshot_id;
      proto.item_id = format_item_id(t.template_id, instance, 1);
      for (std::size_t s = 0; s < t.slots.size(); ++s) {
        if (t.slots[s].kind == SlotKind::Player) proto.player_ids.push_back(*values[s].id);
        if (t.slots[s].kind == SlotKind::Team) proto.team_ids.push_back(*values[s].id);
      }
      auto sql_text = fill_placeholders(t.gold_sql_template, t.slots, values, true);
      sql::ValidatedSql validated;
      try {
        validated = sql::validate_sql(sql_text, store.catalog());
      } catch (const Error& e) {
        throw Error(ErrorCode::Template, "template " + t.template_id + ": gold SQL does not validate: " + e.what(),
                    sql_text);
      }
      fill_analysis(proto, validated);
      proto.gold_answer = author_gold_answer(proto, store, executor);
      proto.empty_gold = answer_is_empty(proto.gold_answer);

      for (int r = 1; r <= 3; ++r) {
        BenchmarkItem item = proto;
        item.item_id = format_item_id(t.template_id, instance, r);
        item.question = fill_placeholders(t.rephrasings[static_cast<std::size_t>(r - 1)], t.slots, values, false);
        out.push_back(std::move(item));
      }

      if (!advance(odometer, chosen)) break;
    }
  }
  return out;
}

std::vector<BenchmarkItem> load_manual_items(const std::string& path, Store& store, const Executor& executor) {
  auto text = read_file(path);
  std::vector<BenchmarkItem> out;
  auto snapshot_id = store.content_id();
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    BenchmarkItem item;
    try {
      item.item_id = j.at("item_id").get<std::string>();
      item.question = j.at("question").get<std::string>();
      item.answer_type = answer_type_from_string(j.at("answer_type").get<std::string>());
      item.player_ids = id_list(j, "player_ids");
      item.team_ids = id_list(j, "team_ids");
      auto sql_text = j.at("gold_sql").get<std::string>();
      fill_analysis(item, sql::validate_sql(sql_text, store.catalog()));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    item.snapshot_id = snapshot_id;
    item.gold_answer = author_gold_answer(item, store, executor);
    item.empty_gold = answer_is_empty(item.gold_answer);
    out.push_back(std::move(item));
  }
  return out;
}

std::string item_to_json(const BenchmarkItem& item) {
  json j{{"schema_version", kBenchmarkSchemaVersion},
         {"item_id", item.item_id},
         {"template_id", item.template_id},
         {"question", item.question},
         {"gold_sql", item.gold_sql},
         {"answer_type", std::string(to_string(item.answer_type))},
         {"gold_answer", detail::answer_to_json(item.gold_answer)},
         {"snapshot_id", item.snapshot_id},
         {"primitives", sql::primitive_names(item.primitives)},
         {"dependent_tables", item.dependent_tables},
         {"entities", {{"player_ids", item.player_ids}, {"team_ids", item.team_ids}}},
         {"empty_gold", item.empty_gold}};
  return j.dump();
}

BenchmarkItem item_from_json(std::string_view line) {
  try {
    auto j = json::parse(line);
    auto version = j.at("schema_version").get<int>();
    if (version != kBenchmarkSchemaVersion)
      throw Error(ErrorCode::Parse, "unsupported benchmark schema_version " + std::to_string(version));
    BenchmarkItem item;
    item.item_id = j.at("item_id").get<std::string>();
    item.template_id = j.value("template_id", "");
    item.question = j.at("question").get<std::string>();
    item.gold_sql = j.at("gold_sql").get<std::string>();
    item.answer_type = answer_type_from_string(j.at("answer_type").get<std::string>());
    item.gold_answer = detail::answer_from_json(j.at("gold_answer"));
    item.snapshot_id = j.at("snapshot_id").get<std::string>();
    item.primitives = sql::primitives_from_names(j.at("primitives").get<std::vector<std::string>>());
    item.dependent_tables = j.value("dependent_tables", std::vector<std::string>{});
    const auto& ent = j.at("entities");
    item.player_ids = id_list(ent, "player_ids");
    item.team_ids = id_list(ent, "team_ids");
    item.empty_gold = j.value("empty_gold", false);
    return item;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad benchmark item: ") + e.what());
  }
}

std::string export_items(std::vector<BenchmarkItem> items) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.item_id < b.item_id; });
  std::string out;
  for (const auto& item : items) out += item_to_json(item) + "\n";
  return out;
}

std::vector<BenchmarkItem> import_items(std::string_view text) {
  std::vector<BenchmarkItem> out;
  std::set<std::string> ids;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(item_from_json(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(out.back().item_id).second)
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": duplicate item_id " + out.back().item_id);
  }
  return out;
}

std::vector<ReproFailure> verify_gold(const std::vector<BenchmarkItem>& items, Store& store, const Executor& executor) {
  std::vector<ReproFailure> failures;
  auto current = store.content_id();
  for (const auto& item : items) {
    if (item.snapshot_id != current) {
      failures.push_back({item.item_id, "pinned snapshot " + item.snapshot_id + " is not loaded (store holds " + current + ")"});
      continue;
    }
    try {
      auto fresh = author_gold_answer(item, store, executor);
      if (fresh.kind != item.gold_answer.kind || fresh.text() != item.gold_answer.text())
        failures.push_back({item.item_id, "gold answer differs on re-execution"});
    } catch (const Error& e) {
      failures.push_back({item.item_id, e.what()});
    }
  }
  return failures;
}

}  // namespace dsqa
