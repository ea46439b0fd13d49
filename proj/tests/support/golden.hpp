// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corerev/codelex/diff.hpp"
#include "corerev/codelex/lexer.hpp"

namespace corerev::testsupport {

// A diff hunk (<name>.diff) with its expected lexer output (<name>.tokens,
// one "kind<TAB>text" line per token of the changed lines).
struct LexerGolden {
  std::string name;
  std::string diff;
  std::vector<codelex::CodeToken> expected;
};

std::vector<LexerGolden> load_lexer_goldens(const std::filesystem::path& dir);

// Empty when the lexer reproduces the golden exactly; otherwise a short
// description of the first difference.
std::string golden_mismatch(const LexerGolden& golden);

}  // namespace corerev::testsupport
