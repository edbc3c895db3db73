#include "detaudit/errors.hpp"

namespace detaudit {

const char* to_string(Severity s) {
  return s == Severity::kWarning ? "warning" : "error";
}

namespace {

std::string parse_message(const std::string& source, const std::string& what,
                          std::optional<std::size_t> offset) {
  std::string msg = source + ": " + what;
  if (offset) msg += " (byte " + std::to_string(*offset) + ")";
  return msg;
}

std::string summarize(const ValidationReport& issues) {
  std::size_t errors = 0;
  for (const auto& i : issues) errors += i.severity == Severity::kError;
  std::string msg = std::to_string(errors) + " validation error(s)";
  for (const auto& i : issues) {
    if (i.severity != Severity::kError) continue;
    msg += "; " + i.message;
    break;
  }
  return msg;
}

}  // namespace

ParseError::ParseError(const std::string& source, const std::string& what,
                       std::optional<std::size_t> byte_offset)
    : std::runtime_error(parse_message(source, what, byte_offset)),
      byte_offset_(byte_offset) {}

ValidationError::ValidationError(ValidationReport issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

}  // namespace detaudit
