#include "dsqa/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

EndpointKind endpoint_from_string(const std::string& s) {
  if (s == "bootstrap-static") return EndpointKind::Bootstrap;
  if (s == "fixtures") return EndpointKind::Fixtures;
  if (s == "element-summary") return EndpointKind::ElementSummary;
  throw Error(ErrorCode::Config, "unknown endpoint '" + s + "' in field map");
}

std::int64_t elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Parse, path + ": " + what, path);
}

Value convert_field(const json& v, const std::string& convert, const ColumnDef& col, const std::string& path,
                    const NormalizeContext& ctx) {
  if (v.is_null()) {
    if (!col.nullable) bad_field(path, "null for non-nullable column " + col.name);
    return Null{};
  }
  if (convert == "real_from_string") {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) bad_field(path, "expected numeric string");
    const auto s = v.get<std::string>();
    try {
      std::size_t used = 0;
      double d = std::stod(s, &used);
      if (used != s.size()) bad_field(path, "expected numeric string, got '" + s + "'");
      return d;
    } catch (const std::logic_error&) {
      bad_field(path, "expected numeric string, got '" + s + "'");
    }
  }
  if (convert == "position_code") {
    if (!v.is_number_integer()) bad_field(path, "expected element_type code");
    static const char* kCodes[] = {"GKP", "DEF", "MID", "FWD"};
    auto code = v.get<std::int64_t>();
    if (code < 1 || code > 4) bad_field(path, "unknown element_type " + std::to_string(code));
    return std::string(kCodes[code - 1]);
  }
  if (convert == "team_name") {
    if (!v.is_number_integer()) bad_field(path, "expected team id");
    auto it = ctx.team_names.find(v.get<std::int64_t>());
    if (it == ctx.team_names.end()) bad_field(path, "unknown team id " + std::to_string(v.get<std::int64_t>()));
    return it->second;
  }
  if (!convert.empty()) throw Error(ErrorCode::Config, "unknown converter '" + convert + "'");
  switch (col.type) {
    case ColumnType::Integer:
      if (!v.is_number_integer()) bad_field(path, "expected integer");
      return v.get<std::int64_t>();
    case ColumnType::Real:
      if (!v.is_number()) bad_field(path, "expected number");
      return v.get<double>();
    case ColumnType::Text:
      if (!v.is_string()) bad_field(path, "expected string");
      return v.get<std::string>();
    case ColumnType::Boolean:
      if (!v.is_boolean()) bad_field(path, "expected boolean");
      return v.get<bool>();
  }
  return Null{};
}

}  // namespace

std::string_view to_string(EndpointKind kind) {
  switch (kind) {
    case EndpointKind::Bootstrap: return "bootstrap-static";
    case EndpointKind::Fixtures: return "fixtures";
    case EndpointKind::ElementSummary: return "element-summary";
  }
  return "?";
}

std::string_view to_string(IngestMode mode) { return mode == IngestMode::Live ? "live" : "replay"; }

const SourceEndpoint& endpoint(EndpointKind kind) {
  static const SourceEndpoint kBootstrap{EndpointKind::Bootstrap, "bootstrap-static/", {}};
  static const SourceEndpoint kFixtures{EndpointKind::Fixtures, "fixtures/", {}};
  static const SourceEndpoint kSummary{EndpointKind::ElementSummary, "element-summary/{player_id}/", {"player_id"}};
  switch (kind) {
    case EndpointKind::Bootstrap: return kBootstrap;
    case EndpointKind::Fixtures: return kFixtures;
    case EndpointKind::ElementSummary: return kSummary;
  }
  return kBootstrap;
}

std::string endpoint_url(const SourceEndpoint& ep, const EndpointParams& params) {
  std::string out;
  std::set<std::string> used;
  for (std::size_t i = 0; i < ep.url_template.size(); ++i) {
    char c = ep.url_template[i];
    if (c != '{') {
      out += c;
      continue;
    }
    auto close = ep.url_template.find('}', i);
    if (close == std::string::npos) throw Error(ErrorCode::Config, "unterminated placeholder in " + ep.url_template);
    auto name = ep.url_template.substr(i + 1, close - i - 1);
    if (std::find(ep.requires_params.begin(), ep.requires_params.end(), name) == ep.requires_params.end())
      throw Error(ErrorCode::Config, "placeholder {" + name + "} not declared by endpoint");
    auto it = params.find(name);
    if (it == params.end()) throw Error(ErrorCode::Config, "missing endpoint parameter " + name);
    out += it->second;
    used.insert(name);
    i = close;
  }
  for (const auto& r : ep.requires_params)
    if (!used.count(r)) throw Error(ErrorCode::Config, "endpoint template lacks placeholder {" + r + "}");
  return out;
}

std::string fixture_file_name(const SourceEndpoint& ep, const EndpointParams& params) {
  std::string name(to_string(ep.kind));
  for (const auto& r : ep.requires_params) {
    auto it = params.find(r);
    if (it == params.end()) throw Error(ErrorCode::Config, "missing endpoint parameter " + r);
    name += "_" + it->second;
  }
  return name + ".json";
}

std::string report_line(const IngestReport& r) {
  std::ostringstream os;
  os << to_string(r.endpoint) << " -> " << r.table << ": fetched " << r.fetched_rows << ", upserted " << r.upserted
     << ", deduplicated " << r.deduplicated << ", " << r.duration_ms << " ms (" << to_string(r.mode) << ")";
  if (!r.unknown_fields.empty()) os << ", " << r.unknown_fields.size() << " unknown fields";
  return os.str();
}

// ---------------------------------------------------------------- sources

ReplaySource::ReplaySource(std::string dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw Error(ErrorCode::Config, "fixture directory not found: " + dir_);
}

std::string ReplaySource::fetch(const SourceEndpoint& ep, const EndpointParams& params) {
  auto file = fixture_file_name(ep, params);
  auto path = (std::filesystem::path(dir_) / file).string();
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::Ingest, "endpoint " + std::string(to_string(ep.kind)) + " unavailable: no recorded payload " + file,
                std::string(to_string(ep.kind)));
  return read_file(path);
}

std::string ReplaySource::captured_at() const {
  auto path = (std::filesystem::path(dir_) / "manifest.json").string();
  if (!std::filesystem::exists(path)) return {};
  try {
    return json::parse(read_file(path)).value("captured_at", "");
  } catch (const json::exception&) {
    return {};
  }
}

LiveSource::LiveSource(std::string base_url, HttpGet get, Sleeper sleep, RetryPolicy policy)
    : base_url_(std::move(base_url)), get_(std::move(get)), sleep_(std::move(sleep)), policy_(policy) {
  if (!get_) get_ = [](const std::string& url) { return http_get(url); };
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (!base_url_.empty() && base_url_.back() != '/') base_url_ += '/';
}

std::string LiveSource::fetch(const SourceEndpoint& ep, const EndpointParams& params) {
  auto url = base_url_ + endpoint_url(ep, params);
  auto backoff = policy_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= policy_.attempts; ++attempt) {
    try {
      return get_(url);
    } catch (const std::exception& e) {
      last_error = e.what();
    }
    if (attempt < policy_.attempts) {
      sleep_(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::Ingest,
              "endpoint " + std::string(to_string(ep.kind)) + " unavailable after " + std::to_string(policy_.attempts) +
                  " attempts (retryable): " + last_error,
              std::string(to_string(ep.kind)));
}

// ---------------------------------------------------------------- field map

FieldMap FieldMap::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("field map: ") + e.what());
  }
  FieldMap fm;
  try {
    for (const auto& jt : doc.at("tables")) {
      TableMap tm;
      tm.table = jt.at("table").get<std::string>();
      tm.endpoint = endpoint_from_string(jt.at("endpoint").get<std::string>());
      tm.array = jt.value("array", "");
      for (const auto& jc : jt.at("columns"))
        tm.columns.push_back({jc.at("column").get<std::string>(), jc.at("field").get<std::string>(),
                              jc.value("convert", "")});
      tm.ignored = jt.value("ignored", std::vector<std::string>{});
      fm.tables_.push_back(std::move(tm));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("field map: ") + e.what());
  }
  return fm;
}

FieldMap FieldMap::load(const std::string& path) { return from_json(read_file(path)); }

const FieldMap::TableMap& FieldMap::table(std::string_view name) const {
  for (const auto& t : tables_)
    if (t.table == name) return t;
  throw Error(ErrorCode::Config, "field map has no entry for table " + std::string(name));
}

std::vector<Row> normalize_records(const FieldMap::TableMap& map, const TableDef& def, std::string_view payload,
                                   const NormalizeContext& context, std::vector<std::string>* unknown_fields,
                                   std::size_t* record_count) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string(to_string(map.endpoint)) + ": malformed JSON: " + e.what());
  }
  const json* records = &doc;
  std::string base = map.array.empty() ? std::string(to_string(map.endpoint)) : map.array;
  if (!map.array.empty()) {
    if (!doc.is_object() || !doc.contains(map.array)) bad_field(base, "missing record array");
    records = &doc.at(map.array);
  }
  if (!records->is_array()) bad_field(base, "expected array");

  std::vector<const ColumnDef*> cols;
  std::set<std::string> known(map.ignored.begin(), map.ignored.end());
  for (const auto& c : map.columns) {
    const auto* cd = def.find_column(c.column);
    if (!cd) throw Error(ErrorCode::Config, "field map column " + def.name + "." + c.column + " not in schema");
    cols.push_back(cd);
    known.insert(c.field);
  }
  for (const auto& cd : def.columns) {
    bool mapped = std::any_of(map.columns.begin(), map.columns.end(), [&](const auto& c) { return c.column == cd.name; });
    if (!mapped) throw Error(ErrorCode::Config, "field map leaves " + def.name + "." + cd.name + " unmapped");
  }

  std::set<std::string> unknown;
  std::vector<Row> rows;
  rows.reserve(records->size());
  for (std::size_t i = 0; i < records->size(); ++i) {
    const auto& rec = (*records)[i];
    std::string path = base + "[" + std::to_string(i) + "]";
    if (!rec.is_object()) bad_field(path, "expected object");
    for (auto it = rec.begin(); it != rec.end(); ++it)
      if (!known.count(it.key())) unknown.insert(base + "." + it.key());
    Row row(def.columns.size());
    for (std::size_t c = 0; c < map.columns.size(); ++c) {
      const auto& mc = map.columns[c];
      auto idx = *def.column_index(mc.column);
      if (mc.field == "$player_id") {
        row[idx] = context.player_id;
        continue;
      }
      auto field_path = path + "." + mc.field;
      if (!rec.contains(mc.field)) {
        if (!cols[c]->nullable) bad_field(field_path, "missing");
        row[idx] = Null{};
        continue;
      }
      row[idx] = convert_field(rec.at(mc.field), mc.convert, *cols[c], field_path, context);
    }
    rows.push_back(std::move(row));
  }
  if (unknown_fields) unknown_fields->assign(unknown.begin(), unknown.end());
  if (record_count) *record_count = records->size();
  return rows;
}

// ---------------------------------------------------------------- ingestor

Ingestor::Ingestor(Store& store, PayloadSource& source, FieldMap map)
    : store_(store), source_(source), map_(std::move(map)) {}

std::map<std::int64_t, std::string> Ingestor::team_names() {
  std::map<std::int64_t, std::string> out;
  auto frame = store_.read_table("teams");
  auto id = *frame.column_index("team_id");
  auto name = *frame.column_index("team_name");
  for (const auto& row : frame.rows) out[std::get<std::int64_t>(row[id])] = std::get<std::string>(row[name]);
  return out;
}

std::vector<IngestReport> Ingestor::sync_persistent() {
  auto writer = store_.lock_writer();
  std::vector<IngestReport> reports;
  std::map<EndpointKind, std::string> payloads;

  auto run = [&](const std::string& table) {
    auto start = Clock::now();
    const auto& tm = map_.table(table);
    auto& payload = payloads[tm.endpoint];
    if (payload.empty()) payload = source_.fetch(endpoint(tm.endpoint), {});
    NormalizeContext ctx;
    if (table != "teams") ctx.team_names = team_names();
    IngestReport rep;
    rep.endpoint = tm.endpoint;
    rep.table = table;
    rep.mode = source_.mode();
    const auto* def = store_.catalog().find_table(table);
    if (!def) throw Error(ErrorCode::Schema, "schema not applied: no table " + table);
    auto rows = normalize_records(tm, *def, payload, ctx, &rep.unknown_fields,
                                  &rep.fetched_rows);
    rep.upserted = store_.upsert_rows(table, std::move(rows));
    rep.deduplicated = rep.fetched_rows - rep.upserted;
    rep.duration_ms = elapsed_ms(start);
    reports.push_back(std::move(rep));
  };
  run("teams");
  run("players");
  run("fixtures");
  return reports;
}

std::vector<Row> Ingestor::fetch_player_detail(std::int64_t player_id, std::string_view table) {
  const auto* def = store_.catalog().find_table(table);
  if (!def) throw Error(ErrorCode::NotFound, "unknown table: " + std::string(table));
  if (def->tier != Tier::Ephemeral)
    throw Error(ErrorCode::Tier, "tier violation: " + def->name + " is not a query-dependent table");
  auto found = store_.query("SELECT player_id FROM players WHERE player_id = " + std::to_string(player_id));
  if (found.rows.empty()) throw Error(ErrorCode::NotFound, "unknown player_id " + std::to_string(player_id));

  const auto& tm = map_.table(def->name);
  auto payload = source_.fetch(endpoint(EndpointKind::ElementSummary), {{"player_id", std::to_string(player_id)}});
  NormalizeContext ctx;
  ctx.team_names = team_names();
  ctx.player_id = player_id;
  auto rows = normalize_records(tm, *def, payload, ctx);

  // Player rows in the payload carry their own element id; keep this player's.
  auto pid = *def->column_index("player_id");
  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [&](const Row& r) { return std::get<std::int64_t>(r[pid]) != player_id; }),
             rows.end());
  std::vector<std::size_t> order;
  if (def->name == "player_history") {
    order = {*def->column_index("season_name")};
  } else {
    order = {*def->column_index("event"), *def->column_index("game_id")};
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    for (auto k : order)
      if (int c = compare_values(a[k], b[k]); c != 0) return c < 0;
    return false;
  });
  return rows;
}

}  // namespace dsqa
