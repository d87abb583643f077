#include "cogbench/errors.hpp"

namespace cogbench {
namespace {

std::string Decorate(const std::string& message, const std::string& pointer,
                     const std::optional<SourceLocation>& where) {
  std::string out;
  if (where) {
    out += "line " + std::to_string(where->line) + ", column " +
           std::to_string(where->column) + ": ";
  }
  out += message;
  if (!pointer.empty()) out += " (at " + pointer + ")";
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string pointer,
                         std::optional<SourceLocation> where)
    : std::runtime_error(Decorate(message, pointer, where)),
      detail_(message),
      pointer_(std::move(pointer)),
      where_(where) {}

}  // namespace cogbench
