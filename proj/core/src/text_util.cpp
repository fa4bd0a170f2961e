#include "text_util.hpp"

namespace mutakill::detail {

bool split_csv_record(std::string_view line, std::vector<std::string>& fields) {
  fields.clear();
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t i = 0;

  auto push_field = [&] {
    if (was_quoted) {
      fields.push_back(current);
    } else {
      fields.emplace_back(trim(current));
    }
    current.clear();
    was_quoted = false;
  };

  while (i < line.size()) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && trim(current).empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
      current.clear();
    } else if (c == ',') {
      push_field();
    } else {
      current += c;
    }
    ++i;
  }
  if (quoted) return false;
  push_field();
  return true;
}

std::string csv_escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                            trim(field).size() != field.size();
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace mutakill::detail
