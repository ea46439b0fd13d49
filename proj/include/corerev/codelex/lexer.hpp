// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace corerev::codelex {

enum class TokenKind {
  keyword,
  identifier,
  number,
  string_literal,
  op,
  punctuation,
  comment,
};

struct CodeToken {
  TokenKind kind = TokenKind::punctuation;
  std::string text;

  bool operator==(const CodeToken&) const = default;
};

std::string_view to_string(TokenKind kind);

bool is_java_keyword(std::string_view word);

// Maximal-munch lexer for Java-like source. Rule order at each position:
// whitespace (discarded), line comment, block comment, identifier/keyword,
// number, string literal, char literal, multi-char operator, single-char
// operator, punctuation. Bytes matching no rule become single punctuation
// tokens (a UTF-8 sequence is kept together). Unterminated comments and
// literals run to the end of input without error.
std::vector<CodeToken> tokenize_code(std::string_view text);

// Token texts of the changed lines of a diff hunk, in file order. Added and
// removed lines are both used; context lines are used only when the hunk
// has no changed lines at all.
std::vector<std::string> code_change_tokens(std::string_view raw_diff);

}  // namespace corerev::codelex
