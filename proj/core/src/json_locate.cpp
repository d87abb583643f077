#include "cogbench/json_locate.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace cogbench {

SourceLocation offset_to_location(std::string_view text, std::size_t offset) noexcept {
  SourceLocation loc{1, 1};
  if (offset > text.size()) offset = text.size();
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

namespace {

std::vector<std::string> SplitPointer(std::string_view pointer) {
  std::vector<std::string> tokens;
  if (pointer.empty()) return tokens;
  std::size_t pos = 1;  // skip leading '/'
  while (true) {
    const std::size_t next = pointer.find('/', pos);
    std::string token(pointer.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                                          : next - pos));
    std::string unescaped;
    for (std::size_t i = 0; i < token.size(); ++i) {
      if (token[i] == '~' && i + 1 < token.size()) {
        unescaped += token[i + 1] == '1' ? '/' : '~';
        ++i;
      } else {
        unescaped += token[i];
      }
    }
    tokens.push_back(std::move(unescaped));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return tokens;
}

// Minimal recursive scanner; only tracks positions, never builds values.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::optional<std::size_t> Find(const std::vector<std::string>& path) {
    SkipSpace();
    return Descend(path, 0);
  }

 private:
  std::optional<std::size_t> Descend(const std::vector<std::string>& path, std::size_t depth) {
    SkipSpace();
    if (depth == path.size()) return pos_;
    if (pos_ >= text_.size()) return std::nullopt;
    if (text_[pos_] == '{') {
      ++pos_;
      while (true) {
        SkipSpace();
        if (pos_ >= text_.size() || text_[pos_] == '}') return std::nullopt;
        auto key = ReadString();
        if (!key) return std::nullopt;
        SkipSpace();
        if (pos_ >= text_.size() || text_[pos_] != ':') return std::nullopt;
        ++pos_;
        SkipSpace();
        if (*key == path[depth]) return Descend(path, depth + 1);
        if (!SkipValue()) return std::nullopt;
        SkipSpace();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
      }
    }
    if (text_[pos_] == '[') {
      const std::string& token = path[depth];
      if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
        return std::nullopt;
      const std::size_t want = std::stoul(token);
      ++pos_;
      for (std::size_t i = 0;; ++i) {
        SkipSpace();
        if (pos_ >= text_.size() || text_[pos_] == ']') return std::nullopt;
        if (i == want) return Descend(path, depth + 1);
        if (!SkipValue()) return std::nullopt;
        SkipSpace();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
      }
    }
    return std::nullopt;
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::optional<std::string> ReadString() {
    if (pos_ >= text_.size() || text_[pos_] != '"') return std::nullopt;
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) return std::nullopt;
    ++pos_;
    return out;
  }

  bool SkipValue() {
    SkipSpace();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    if (c == '"') return ReadString().has_value();
    if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++pos_;
      while (true) {
        SkipSpace();
        if (pos_ >= text_.size()) return false;
        if (text_[pos_] == close) {
          ++pos_;
          return true;
        }
        if (c == '{') {
          if (!ReadString()) return false;
          SkipSpace();
          if (pos_ >= text_.size() || text_[pos_] != ':') return false;
          ++pos_;
        }
        if (!SkipValue()) return false;
        SkipSpace();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
      }
    }
    // number, true, false, null
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
           text_[pos_] != ']' && !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return pos_ > start;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::optional<SourceLocation> locate_pointer(std::string_view text, std::string_view pointer) {
  Scanner scanner(text);
  const auto offset = scanner.Find(SplitPointer(pointer));
  if (!offset) return std::nullopt;
  return offset_to_location(text, *offset);
}

}  // namespace cogbench
