#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/io.hpp"

namespace mcfuse {

// Line reader shared by every resource loader. Skips blank lines and lines
// starting with '#'; errors carry path and line number.
class TextFile {
public:
  explicit TextFile(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw InputError("cannot open " + path.string());
  }

  bool next_line(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      return true;
    }
    return false;
  }

  /// Next line split on tabs.
  bool next_record(std::vector<std::string>& fields) {
    std::string line;
    if (!next_line(line)) return false;
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return true;
  }

  [[noreturn]] void fail(std::string_view message) const {
    throw InputError(path_.string() + ":" + std::to_string(line_no_) + ": " + std::string(message));
  }

  std::size_t line_number() const { return line_no_; }

private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace mcfuse
