// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace corerev::codelex {

enum class ChangeKind { added, removed, context };

struct DiffLine {
  ChangeKind change_kind = ChangeKind::context;
  // Line text with the leading '+' or '-' marker removed. Context lines are
  // kept verbatim.
  std::string content;

  bool operator==(const DiffLine&) const = default;
};

// Splits newline-delimited diff text into lines. Hunk headers ("@@ ...") and
// git file headers ("diff --git", "--- a/", "+++ b/", "\ No newline ...") are
// dropped. A trailing newline does not produce an extra empty line.
std::vector<DiffLine> split_diff(std::string_view raw);

std::string_view to_string(ChangeKind kind);

}  // namespace corerev::codelex
