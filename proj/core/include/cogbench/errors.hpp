#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace cogbench {

// A caller broke a documented precondition (bad index, empty set, size
// mismatch).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An internal invariant failed. Always a bug in this library.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Source position inside a configuration document, 1-based.
struct SourceLocation {
  int line = 0;
  int column = 0;
};

// Invalid scenario file, run configuration, or grid axes.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, std::string pointer = {},
                       std::optional<SourceLocation> where = std::nullopt);

  // JSON pointer of the offending value ("" when not tied to a document).
  const std::string& pointer() const noexcept { return pointer_; }
  const std::optional<SourceLocation>& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::string pointer_;
  std::optional<SourceLocation> where_;
};

// Numeric input that the analysis pipeline cannot accept (too few rows,
// indefinite correlation matrix, incomplete CSV).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The experiment grid handed to assemble() has holes.
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cogbench
