// SPDX-License-Identifier: Apache-2.0
#include "corerev/codelex/diff.hpp"

namespace corerev::codelex {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool is_header(std::string_view line) {
  return starts_with(line, "@@") || starts_with(line, "diff --git ") ||
         starts_with(line, "--- a/") || starts_with(line, "+++ b/") ||
         starts_with(line, "--- /dev/null") ||
         starts_with(line, "+++ /dev/null") ||
         starts_with(line, "\\ No newline");
}

}  // namespace

std::vector<DiffLine> split_diff(std::string_view raw) {
  std::vector<DiffLine> lines;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t end = raw.find('\n', pos);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_header(line)) continue;

    DiffLine out;
    if (!line.empty() && line.front() == '+') {
      out.change_kind = ChangeKind::added;
      out.content = std::string(line.substr(1));
    } else if (!line.empty() && line.front() == '-') {
      out.change_kind = ChangeKind::removed;
      out.content = std::string(line.substr(1));
    } else {
      out.change_kind = ChangeKind::context;
      out.content = std::string(line);
    }
    lines.push_back(std::move(out));
  }
  return lines;
}

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::added: return "added";
    case ChangeKind::removed: return "removed";
    case ChangeKind::context: return "context";
  }
  return "context";
}

}  // namespace corerev::codelex
