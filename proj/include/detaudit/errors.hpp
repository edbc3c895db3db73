#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace detaudit {

enum class Severity { kWarning, kError };

const char* to_string(Severity s);

struct ValidationIssue {
  Severity severity = Severity::kError;
  std::optional<std::int64_t> image_id;
  std::string message;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Malformed input text (not JSON, wrong shape). Carries the parser's byte
/// position when one is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, const std::string& what,
             std::optional<std::size_t> byte_offset = std::nullopt);

  std::optional<std::size_t> byte_offset() const { return byte_offset_; }

 private:
  std::optional<std::size_t> byte_offset_;
};

/// Well-formed input that violates a data contract. `issues()` lists every
/// offender found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport issues);

  const ValidationReport& issues() const { return issues_; }

 private:
  ValidationReport issues_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace detaudit
