#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "cogbench/errors.hpp"

namespace cogbench {

// Line/column of a byte offset inside `text`.
SourceLocation offset_to_location(std::string_view text, std::size_t offset) noexcept;

// Finds where the value addressed by an RFC 6901 JSON pointer begins in
// `text`. Returns nullopt when the text is not well-formed up to that value
// or the pointer does not resolve.
std::optional<SourceLocation> locate_pointer(std::string_view text, std::string_view pointer);

}  // namespace cogbench
