#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsqa/schema.hpp"

namespace dsqa {

/// A versioned prompt file with a system and a user section. Placeholders are
/// written `{{name}}`. See docs/formats.md for the file layout.
struct PromptTemplate {
  std::string name;
  int version = 0;
  std::string system;
  std::string user;

  static PromptTemplate parse(std::string_view text, std::string name);
  static PromptTemplate load(const std::string& path);

  /// `name@version`, stored in every request digest.
  std::string version_tag() const;
};

using PromptVars = std::map<std::string, std::string>;

/// Substitutes placeholders. Throws Error(Template) when a placeholder has no
/// value.
std::string render_prompt(std::string_view text, const PromptVars& vars);

/// Loads `<dir>/<name>.prompt`.
PromptTemplate load_prompt(const std::string& dir, const std::string& name);

/// Targeted instructions added to the SQL-generation prompt.
struct PromptHints {
  std::vector<std::pair<std::string, std::string>> table_hints;      // table, guidance
  std::vector<std::pair<std::string, std::string>> synonym_map;      // phrase, table.column
  std::vector<std::pair<std::string, std::string>> column_cautions;  // table.column, caution
  std::vector<std::pair<std::string, std::string>> derived_fields;   // table.column, formula
  std::vector<std::pair<std::string, std::string>> scale_notes;      // table.column, range

  static PromptHints parse(std::string_view text);
  static PromptHints load(const std::string& path);
};

/// Every table and column named by the hints must exist; the synonym for
/// "team position", the form formula and the strength scale are required.
/// Throws Error(Config).
void validate_hints(const PromptHints& hints, const SchemaCatalog& catalog);

/// Deterministic text block listing all five hint categories.
std::string render_hints(const PromptHints& hints);

}  // namespace dsqa
