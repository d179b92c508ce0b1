#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dsqa {

std::string sha256_hex(std::string_view data);

std::string ascii_lower(std::string_view s);
std::string ascii_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

/// Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// SQL LIKE semantics with ASCII case folding: '%' matches any run, '_' one byte.
bool like_match(std::string_view text, std::string_view pattern);

/// Case-insensitive whole-word search (word = run of alphanumerics).
bool contains_word(std::string_view text, std::string_view word);

std::vector<std::string> split_words(std::string_view text);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace dsqa
