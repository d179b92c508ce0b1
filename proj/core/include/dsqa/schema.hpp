#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/value.hpp"

namespace dsqa {

enum class Tier { Persistent, Ephemeral };

std::string_view to_string(Tier tier);

struct ColumnDef {
  std::string name;
  ColumnType type = ColumnType::Integer;
  bool nullable = false;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<std::string> primary_key;
  Tier tier = Tier::Persistent;

  const ColumnDef* find_column(std::string_view column) const;
  std::optional<std::size_t> column_index(std::string_view column) const;
  std::vector<std::size_t> primary_key_indices() const;
};

struct SchemaCatalog {
  std::vector<TableDef> tables;
  int version = 1;

  const TableDef* find_table(std::string_view name) const;
  std::vector<const TableDef*> tables_in(Tier tier) const;
};

inline constexpr std::string_view kPersistentTables[] = {"players", "teams", "fixtures"};
inline constexpr std::string_view kEphemeralTables[] = {"player_past", "player_history", "player_future"};

bool is_ephemeral_table(std::string_view name);

/// The closed six-table schema shipped with the engine.
SchemaCatalog default_catalog();

/// Checks table/column uniqueness, primary keys, the fixed tier partition and
/// the required column sets. Throws Error(Schema) or Error(Tier).
void validate_catalog(const SchemaCatalog& catalog);

/// Deterministic human/LLM-readable rendering; identical catalogs give
/// byte-identical text.
std::string render_schema_text(const SchemaCatalog& catalog);

/// Schema text restricted to the given tables and columns, used for the
/// entity-lookup prompt.
std::string render_schema_subset(const SchemaCatalog& catalog,
                                 const std::vector<std::pair<std::string, std::vector<std::string>>>& subset);

/// Catalog documents in JSON (`{"version":1,"tables":[...]}`); unknown column
/// types raise Error(Schema).
SchemaCatalog catalog_from_json(std::string_view json_text);
std::string catalog_to_json(const SchemaCatalog& catalog);

}  // namespace dsqa
