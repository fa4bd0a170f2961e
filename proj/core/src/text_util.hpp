#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mutakill::detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits one CSV record. Double-quoted fields may contain commas and
// doubled quotes; unquoted fields are trimmed of surrounding whitespace.
// Returns false on unbalanced quotes.
bool split_csv_record(std::string_view line, std::vector<std::string>& fields);

// Quotes the field if it contains a comma, quote, CR/LF, or surrounding
// whitespace that would otherwise be trimmed on reload.
std::string csv_escape(std::string_view field);

}  // namespace mutakill::detail
