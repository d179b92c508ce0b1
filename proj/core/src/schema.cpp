#include "dsqa/schema.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dsqa/error.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;

ColumnDef col(std::string name, ColumnType type, bool nullable = false) {
  return ColumnDef{std::move(name), type, nullable};
}

const std::map<std::string, std::vector<std::string>>& required_columns() {
  static const std::map<std::string, std::vector<std::string>> req = {
      {"players", {"player_id", "web_name", "player_position", "team_id", "goals_scored", "assists",
                   "minutes", "form"}},
      {"teams", {"team_id", "team_name", "position", "played", "win", "draw", "loss", "points", "strength"}},
      {"fixtures", {"game_id", "gw", "finished", "team_h_name", "team_a_name", "kickoff_time"}},
      {"player_history", {"player_id", "season_name", "total_points", "minutes", "goals_scored", "assists",
                          "clean_sheets", "yellow_cards", "red_cards", "saves"}},
      {"player_past", {"player_id", "event", "goals_scored", "assists", "minutes", "yellow_cards",
                       "red_cards"}},
      {"player_future", {"player_id", "event", "event_name", "team_h_name", "team_a_name", "is_home",
                         "difficulty", "kickoff_time"}},
  };
  return req;
}

}  // namespace

std::string_view to_string(Tier tier) { return tier == Tier::Persistent ? "persistent" : "ephemeral"; }

const ColumnDef* TableDef::find_column(std::string_view column) const {
  for (const auto& c : columns)
    if (c.name == column) return &c;
  return nullptr;
}

std::optional<std::size_t> TableDef::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == column) return i;
  return std::nullopt;
}

std::vector<std::size_t> TableDef::primary_key_indices() const {
  std::vector<std::size_t> out;
  for (const auto& k : primary_key) out.push_back(*column_index(k));
  return out;
}

const TableDef* SchemaCatalog::find_table(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<const TableDef*> SchemaCatalog::tables_in(Tier tier) const {
  std::vector<const TableDef*> out;
  for (const auto& t : tables)
    if (t.tier == tier) out.push_back(&t);
  return out;
}

bool is_ephemeral_table(std::string_view name) {
  return std::find(std::begin(kEphemeralTables), std::end(kEphemeralTables), name) !=
         std::end(kEphemeralTables);
}

SchemaCatalog default_catalog() {
  using CT = ColumnType;
  SchemaCatalog cat;
  cat.version = 1;
  cat.tables.push_back(TableDef{
      "players",
      {col("player_id", CT::Integer), col("web_name", CT::Text), col("first_name", CT::Text),
       col("second_name", CT::Text), col("player_position", CT::Text), col("team_id", CT::Integer),
       col("goals_scored", CT::Integer), col("assists", CT::Integer), col("minutes", CT::Integer),
       col("form", CT::Real), col("total_points", CT::Integer), col("clean_sheets", CT::Integer),
       col("saves", CT::Integer), col("penalties_saved", CT::Integer), col("yellow_cards", CT::Integer),
       col("red_cards", CT::Integer), col("now_cost", CT::Integer), col("selected_by_percent", CT::Real)},
      {"player_id"},
      Tier::Persistent});
  cat.tables.push_back(TableDef{
      "teams",
      {col("team_id", CT::Integer), col("team_name", CT::Text), col("short_name", CT::Text),
       col("position", CT::Integer), col("played", CT::Integer), col("win", CT::Integer),
       col("draw", CT::Integer), col("loss", CT::Integer), col("points", CT::Integer),
       col("strength", CT::Integer)},
      {"team_id"},
      Tier::Persistent});
  cat.tables.push_back(TableDef{
      "fixtures",
      {col("game_id", CT::Integer), col("gw", CT::Integer, true), col("finished", CT::Boolean),
       col("team_h_name", CT::Text), col("team_a_name", CT::Text), col("team_h_score", CT::Integer, true),
       col("team_a_score", CT::Integer, true), col("kickoff_time", CT::Text, true)},
      {"game_id"},
      Tier::Persistent});
  cat.tables.push_back(TableDef{
      "player_past",
      {col("player_id", CT::Integer), col("event", CT::Integer), col("game_id", CT::Integer),
       col("opponent_team_name", CT::Text), col("was_home", CT::Boolean), col("total_points", CT::Integer),
       col("minutes", CT::Integer), col("goals_scored", CT::Integer), col("assists", CT::Integer),
       col("clean_sheets", CT::Integer), col("yellow_cards", CT::Integer), col("red_cards", CT::Integer),
       col("saves", CT::Integer), col("kickoff_time", CT::Text, true)},
      {"player_id", "event", "game_id"},
      Tier::Ephemeral});
  cat.tables.push_back(TableDef{
      "player_history",
      {col("player_id", CT::Integer), col("season_name", CT::Text), col("total_points", CT::Integer),
       col("minutes", CT::Integer), col("goals_scored", CT::Integer), col("assists", CT::Integer),
       col("clean_sheets", CT::Integer), col("yellow_cards", CT::Integer), col("red_cards", CT::Integer),
       col("saves", CT::Integer)},
      {"player_id", "season_name"},
      Tier::Ephemeral});
  cat.tables.push_back(TableDef{
      "player_future",
      {col("player_id", CT::Integer), col("event", CT::Integer), col("game_id", CT::Integer),
       col("event_name", CT::Text), col("team_h_name", CT::Text), col("team_a_name", CT::Text),
       col("is_home", CT::Boolean), col("difficulty", CT::Integer), col("kickoff_time", CT::Text, true)},
      {"player_id", "event", "game_id"},
      Tier::Ephemeral});
  return cat;
}

void validate_catalog(const SchemaCatalog& catalog) {
  if (catalog.tables.empty()) throw Error(ErrorCode::Schema, "no tables");
  std::set<std::string> names;
  for (const auto& t : catalog.tables) {
    if (!names.insert(t.name).second) throw Error(ErrorCode::Schema, "duplicate table name: " + t.name);
    std::set<std::string> cols;
    for (const auto& c : t.columns)
      if (!cols.insert(c.name).second)
        throw Error(ErrorCode::Schema, "duplicate column name: " + t.name + "." + c.name);
    if (t.primary_key.empty()) throw Error(ErrorCode::Schema, "table " + t.name + " has no primary key");
    std::set<std::string> pk;
    for (const auto& k : t.primary_key) {
      const auto* c = t.find_column(k);
      if (!c) throw Error(ErrorCode::Schema, "primary key column " + t.name + "." + k + " does not exist");
      if (c->nullable) throw Error(ErrorCode::Schema, "primary key column " + t.name + "." + k + " is nullable");
      if (!pk.insert(k).second) throw Error(ErrorCode::Schema, "primary key repeats column " + k);
    }
    bool persistent_name = std::find(std::begin(kPersistentTables), std::end(kPersistentTables), t.name) !=
                           std::end(kPersistentTables);
    bool ephemeral_name = is_ephemeral_table(t.name);
    if (!persistent_name && !ephemeral_name) throw Error(ErrorCode::Schema, "unknown table: " + t.name);
    if ((persistent_name && t.tier != Tier::Persistent) || (ephemeral_name && t.tier != Tier::Ephemeral))
      throw Error(ErrorCode::Tier, "tier violation: " + t.name + " cannot be " + std::string(to_string(t.tier)));
    for (const auto& req : required_columns().at(t.name))
      if (!t.find_column(req)) throw Error(ErrorCode::Schema, "table " + t.name + " lacks required column " + req);
  }
  for (auto n : kPersistentTables)
    if (!names.count(std::string(n))) throw Error(ErrorCode::Schema, "missing table: " + std::string(n));
  for (auto n : kEphemeralTables)
    if (!names.count(std::string(n))) throw Error(ErrorCode::Schema, "missing table: " + std::string(n));
}

namespace {

void render_table(std::ostringstream& os, const TableDef& t, const std::vector<std::string>* only) {
  os << t.name << " [" << to_string(t.tier) << "] primary key (";
  for (std::size_t i = 0; i < t.primary_key.size(); ++i) os << (i ? ", " : "") << t.primary_key[i];
  os << ")\n";
  std::size_t width = 0;
  for (const auto& c : t.columns) width = std::max(width, c.name.size());
  for (const auto& c : t.columns) {
    if (only && std::find(only->begin(), only->end(), c.name) == only->end()) continue;
    os << "  " << c.name << std::string(width - c.name.size() + 2, ' ') << to_string(c.type)
       << (c.nullable ? " null" : " not null") << '\n';
  }
}

}  // namespace

std::string render_schema_text(const SchemaCatalog& catalog) {
  std::ostringstream os;
  os << "schema version " << catalog.version << "\n";
  for (const auto& t : catalog.tables) {
    os << '\n';
    render_table(os, t, nullptr);
  }
  return os.str();
}

std::string render_schema_subset(const SchemaCatalog& catalog,
                                 const std::vector<std::pair<std::string, std::vector<std::string>>>& subset) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [table, cols] : subset) {
    const auto* t = catalog.find_table(table);
    if (!t) throw Error(ErrorCode::Schema, "unknown table: " + table);
    if (!first) os << '\n';
    first = false;
    render_table(os, *t, &cols);
  }
  return os.str();
}

SchemaCatalog catalog_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("catalog document: ") + e.what());
  }
  SchemaCatalog cat;
  cat.version = doc.value("version", 1);
  for (const auto& jt : doc.at("tables")) {
    TableDef t;
    t.name = jt.at("name").get<std::string>();
    auto tier = jt.value("tier", std::string("persistent"));
    if (tier == "persistent") {
      t.tier = Tier::Persistent;
    } else if (tier == "ephemeral") {
      t.tier = Tier::Ephemeral;
    } else {
      throw Error(ErrorCode::Schema, "unknown tier '" + tier + "' for table " + t.name);
    }
    for (const auto& jc : jt.at("columns")) {
      auto type_name = jc.at("type").get<std::string>();
      auto type = column_type_from_string(type_name);
      if (!type) throw Error(ErrorCode::Schema, "unknown column type '" + type_name + "'");
      t.columns.push_back({jc.at("name").get<std::string>(), *type, jc.value("nullable", false)});
    }
    t.primary_key = jt.at("primary_key").get<std::vector<std::string>>();
    cat.tables.push_back(std::move(t));
  }
  return cat;
}

std::string catalog_to_json(const SchemaCatalog& catalog) {
  json doc;
  doc["version"] = catalog.version;
  doc["tables"] = json::array();
  for (const auto& t : catalog.tables) {
    json jt;
    jt["name"] = t.name;
    jt["tier"] = std::string(to_string(t.tier));
    jt["primary_key"] = t.primary_key;
    jt["columns"] = json::array();
    for (const auto& c : t.columns)
      jt["columns"].push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}, {"nullable", c.nullable}});
    doc["tables"].push_back(std::move(jt));
  }
  return doc.dump(2);
}

}  // namespace dsqa
