#include "dsqa/prompt.hpp"

#include <algorithm>
#include <filesystem>

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

// "quoted string" with \" and \\ escapes, or a bare token.
std::string hint_token(std::string_view raw, std::size_t line_no) {
  raw = trim(raw);
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) {
        out += raw[++i];
        continue;
      }
      if (raw[i] == '"') throw Error(ErrorCode::Parse, "hints line " + std::to_string(line_no) + ": stray quote");
      out += raw[i];
    }
    return out;
  }
  if (raw.empty() || raw.front() == '"')
    throw Error(ErrorCode::Parse, "hints line " + std::to_string(line_no) + ": malformed value");
  return std::string(raw);
}

// Position of the '=' separating key and value, skipping a quoted key.
std::size_t key_end(std::string_view line) {
  std::size_t i = 0;
  if (!line.empty() && line[0] == '"') {
    for (i = 1; i < line.size(); ++i) {
      if (line[i] == '\\') {
        ++i;
        continue;
      }
      if (line[i] == '"') break;
    }
  }
  return line.find('=', i);
}

std::pair<std::string, std::string> split_ref(const std::string& ref) {
  auto dot = ref.find('.');
  if (dot == std::string::npos) return {ref, ""};
  return {ref.substr(0, dot), ref.substr(dot + 1)};
}

void check_ref(const SchemaCatalog& catalog, const std::string& ref, const std::string& section) {
  auto [table, column] = split_ref(ref);
  const auto* def = catalog.find_table(table);
  if (!def) throw Error(ErrorCode::Config, "hints [" + section + "] reference unknown table '" + table + "'", ref);
  if (!column.empty() && !def->find_column(column))
    throw Error(ErrorCode::Config, "hints [" + section + "] reference unknown column '" + ref + "'", ref);
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text, std::string name) {
  PromptTemplate t;
  t.name = std::move(name);
  std::string* section = nullptr;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    auto stripped = trim(line);
    if (stripped == "--- system") {
      section = &t.system;
      continue;
    }
    if (stripped == "--- user") {
      section = &t.user;
      continue;
    }
    if (section) {
      *section += std::string(line) + "\n";
      continue;
    }
    if (stripped.empty() || stripped.front() == '#') continue;
    if (stripped.substr(0, 8) == "version:") {
      try {
        t.version = std::stoi(std::string(trim(stripped.substr(8))));
      } catch (const std::exception&) {
        throw Error(ErrorCode::Template, "prompt " + t.name + ": bad version on line " + std::to_string(line_no));
      }
      continue;
    }
    throw Error(ErrorCode::Template, "prompt " + t.name + ": unexpected text before sections on line " +
                                         std::to_string(line_no));
  }
  if (t.version <= 0) throw Error(ErrorCode::Template, "prompt " + t.name + ": missing version");
  if (t.user.empty()) throw Error(ErrorCode::Template, "prompt " + t.name + ": missing user section");
  t.system = strip_trailing_newlines(t.system);
  t.user = strip_trailing_newlines(t.user);
  return t;
}

PromptTemplate PromptTemplate::load(const std::string& path) {
  return parse(read_file(path), std::filesystem::path(path).stem().string());
}

std::string PromptTemplate::version_tag() const { return name + "@" + std::to_string(version); }

PromptTemplate load_prompt(const std::string& dir, const std::string& name) {
  return PromptTemplate::load((std::filesystem::path(dir) / (name + ".prompt")).string());
}

std::string render_prompt(std::string_view text, const PromptVars& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) throw Error(ErrorCode::Template, "unterminated placeholder in prompt");
    out.append(text.substr(pos, open - pos));
    auto key = std::string(trim(text.substr(open + 2, close - open - 2)));
    auto it = vars.find(key);
    if (it == vars.end()) throw Error(ErrorCode::Template, "no value for prompt placeholder '" + key + "'", key);
    out += it->second;
    pos = close + 2;
  }
  return out;
}

PromptHints PromptHints::parse(std::string_view text) {
  PromptHints h;
  std::vector<std::pair<std::string, std::string>>* section = nullptr;
  std::size_t line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::Parse, "hints line " + std::to_string(line_no) + ": bad section");
      auto name = trim(line.substr(1, line.size() - 2));
      if (name == "table_hints") section = &h.table_hints;
      else if (name == "synonyms") section = &h.synonym_map;
      else if (name == "cautions") section = &h.column_cautions;
      else if (name == "derived") section = &h.derived_fields;
      else if (name == "scales") section = &h.scale_notes;
      else throw Error(ErrorCode::Parse, "hints line " + std::to_string(line_no) + ": unknown section '" +
                                             std::string(name) + "'");
      continue;
    }
    if (!section) throw Error(ErrorCode::Parse, "hints line " + std::to_string(line_no) + ": entry outside a section");
    auto eq = key_end(line);
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::Parse, "hints line " + std::to_string(line_no) + ": expected key = value");
    section->emplace_back(hint_token(line.substr(0, eq), line_no), hint_token(line.substr(eq + 1), line_no));
  }
  return h;
}

PromptHints PromptHints::load(const std::string& path) { return parse(read_file(path)); }

void validate_hints(const PromptHints& hints, const SchemaCatalog& catalog) {
  for (const auto& [table, _] : hints.table_hints) check_ref(catalog, table, "table_hints");
  for (const auto& [_, ref] : hints.synonym_map) check_ref(catalog, ref, "synonyms");
  for (const auto& [ref, _] : hints.column_cautions) check_ref(catalog, ref, "cautions");
  for (const auto& [ref, _] : hints.derived_fields) check_ref(catalog, ref, "derived");
  for (const auto& [ref, _] : hints.scale_notes) check_ref(catalog, ref, "scales");

  auto has = [](const auto& list, auto pred) { return std::any_of(list.begin(), list.end(), pred); };
  if (!has(hints.synonym_map, [](const auto& e) { return iequals(e.first, "team position") && e.second == "teams.position"; }))
    throw Error(ErrorCode::Config, "hints must map \"team position\" to teams.position");
  if (!has(hints.derived_fields, [](const auto& e) { return e.first == "players.form"; }))
    throw Error(ErrorCode::Config, "hints must define players.form");
  if (!has(hints.scale_notes, [](const auto& e) { return e.first == "teams.strength"; }))
    throw Error(ErrorCode::Config, "hints must describe the teams.strength scale");
}

std::string render_hints(const PromptHints& hints) {
  std::string out;
  out += "Table hints:\n";
  for (const auto& [t, g] : hints.table_hints) out += "- " + t + ": " + g + "\n";
  out += "Synonym mappings:\n";
  for (const auto& [p, c] : hints.synonym_map) out += "- \"" + p + "\" means " + c + "\n";
  out += "Column cautions:\n";
  for (const auto& [c, t] : hints.column_cautions) out += "- " + c + ": " + t + "\n";
  out += "Derived-field formulas:\n";
  for (const auto& [c, f] : hints.derived_fields) out += "- " + c + ": " + f + "\n";
  out += "Scale explanations:\n";
  for (const auto& [c, r] : hints.scale_notes) out += "- " + c + ": " + r + "\n";
  return out;
}

}  // namespace dsqa
