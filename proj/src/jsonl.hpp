#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "detaudit/dataset.hpp"
#include "detaudit/errors.hpp"

namespace detaudit::detail {

inline std::string header_line(const nlohmann::json& header) {
  if (header.is_null()) return {};
  return nlohmann::json{{"header", header}}.dump() + "\n";
}

// Calls fn(record, "line N") for every non-blank line except header lines.
template <typename Fn>
void for_each_record(std::string_view text, const std::string& source, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t offset = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    offset = pos;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line.begin(), line.end());
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, where + ": " + e.what(), offset + (e.byte > 0 ? e.byte - 1 : 0));
    }
    if (!rec.is_object()) throw ParseError(source, where + " is not a JSON object");
    if (rec.contains("header")) continue;
    fn(rec, where);
    if (end == text.size()) break;
  }
}

inline ImageId record_image_id(const nlohmann::json& rec, const std::string& source,
                               const std::string& where) {
  auto it = rec.find("image_id");
  if (it == rec.end() || !it->is_number_integer()) {
    throw ParseError(source, where + ": \"image_id\" must be an integer");
  }
  return it->get<ImageId>();
}

}  // namespace detaudit::detail
