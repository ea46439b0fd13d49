// SPDX-License-Identifier: Apache-2.0
#include "corerev/codelex/lexer.hpp"

#include <algorithm>
#include <array>

#include "corerev/codelex/diff.hpp"

namespace corerev::codelex {

namespace {

constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",
    "case",     "catch",      "char",      "class",     "const",
    "continue", "default",    "do",        "double",    "else",
    "enum",     "extends",    "final",     "finally",   "float",
    "for",      "goto",       "if",        "implements", "import",
    "instanceof", "int",      "interface", "long",      "native",
    "new",      "package",    "private",   "protected", "public",
    "return",   "short",      "static",    "strictfp",  "super",
    "switch",   "synchronized", "this",    "throw",     "throws",
    "transient", "try",       "void",      "volatile",  "while",
    "true",     "false",      "null",
};

// Longest first so the first prefix match is the maximal munch.
constexpr std::array<std::string_view, 25> kMultiCharOps = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--",
    "&&",   "||",  "==",  "!=",  "<=",  ">=", "+=", "-=", "*=",
    "/=",   "%=",  "&=",  "|=",  "^=",  "<<", ">>",
};

constexpr std::string_view kSingleOps = "=+-*/%&|^!~?<>";
constexpr std::string_view kPunctuation = "(){}[];,.:@";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$';
}
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<CodeToken> run() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (is_space(c)) {
        ++pos_;
      } else if (peek_is("//")) {
        std::size_t eol = src_.find_first_of("\r\n", pos_);
        emit(TokenKind::comment, eol == std::string_view::npos ? src_.size() : eol);
      } else if (peek_is("/*")) {
        std::size_t close = src_.find("*/", pos_ + 2);
        emit(TokenKind::comment,
             close == std::string_view::npos ? src_.size() : close + 2);
      } else if (is_ident_start(c)) {
        std::size_t end = pos_ + 1;
        while (end < src_.size() && is_ident_char(src_[end])) ++end;
        bool kw = is_java_keyword(src_.substr(pos_, end - pos_));
        emit(kw ? TokenKind::keyword : TokenKind::identifier, end);
      } else if (is_digit(c) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  is_digit(src_[pos_ + 1]))) {
        emit(TokenKind::number, number_end());
      } else if (peek_is("\"\"\"")) {
        std::size_t close = src_.find("\"\"\"", pos_ + 3);
        emit(TokenKind::string_literal,
             close == std::string_view::npos ? src_.size() : close + 3);
      } else if (c == '"' || c == '\'') {
        emit(TokenKind::string_literal, quoted_end(c));
      } else if (std::size_t len = operator_length(); len > 0) {
        emit(TokenKind::op, pos_ + len);
      } else if (kPunctuation.find(c) != std::string_view::npos) {
        emit(TokenKind::punctuation, pos_ + 1);
      } else {
        emit(TokenKind::punctuation, unknown_end());
      }
    }
    return std::move(tokens_);
  }

 private:
  bool peek_is(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  void emit(TokenKind kind, std::size_t end) {
    tokens_.push_back({kind, std::string(src_.substr(pos_, end - pos_))});
    pos_ = end;
  }

  std::size_t number_end() const {
    std::size_t i = pos_;
    auto digits = [&](auto pred) {
      while (i < src_.size() && (pred(src_[i]) || src_[i] == '_')) ++i;
    };
    if (src_[i] == '0' && i + 1 < src_.size() &&
        (src_[i + 1] == 'x' || src_[i + 1] == 'X')) {
      i += 2;
      digits(is_hex);
    } else if (src_[i] == '0' && i + 1 < src_.size() &&
               (src_[i + 1] == 'b' || src_[i + 1] == 'B')) {
      i += 2;
      digits([](char ch) { return ch == '0' || ch == '1'; });
    } else {
      digits(is_digit);
      if (i + 1 < src_.size() && src_[i] == '.' && is_digit(src_[i + 1])) {
        ++i;
        digits(is_digit);
      }
      if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
        if (j < src_.size() && is_digit(src_[j])) {
          i = j;
          digits(is_digit);
        }
      }
    }
    if (i < src_.size() && std::string_view("lLfFdD").find(src_[i]) !=
                               std::string_view::npos) {
      ++i;
    }
    return i;
  }

  std::size_t quoted_end(char quote) const {
    std::size_t i = pos_ + 1;
    while (i < src_.size()) {
      if (src_[i] == '\\') {
        i += 2;
      } else if (src_[i] == quote) {
        return i + 1;
      } else {
        ++i;
      }
    }
    return src_.size();
  }

  std::size_t operator_length() const {
    for (std::string_view op : kMultiCharOps) {
      if (peek_is(op)) return op.size();
    }
    return kSingleOps.find(src_[pos_]) != std::string_view::npos ? 1 : 0;
  }

  std::size_t unknown_end() const {
    auto lead = static_cast<unsigned char>(src_[pos_]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    std::size_t end = pos_ + 1;
    while (end < src_.size() && end < pos_ + len &&
           (static_cast<unsigned char>(src_[end]) & 0xC0) == 0x80) {
      ++end;
    }
    return end;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<CodeToken> tokens_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::string_literal: return "string_literal";
    case TokenKind::op: return "operator";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::comment: return "comment";
  }
  return "punctuation";
}

bool is_java_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) !=
         kKeywords.end();
}

std::vector<CodeToken> tokenize_code(std::string_view text) {
  return Lexer(text).run();
}

std::vector<std::string> code_change_tokens(std::string_view raw_diff) {
  std::vector<DiffLine> lines = split_diff(raw_diff);
  bool any_changed = std::any_of(lines.begin(), lines.end(), [](const auto& l) {
    return l.change_kind != ChangeKind::context;
  });
  std::vector<std::string> out;
  for (const DiffLine& line : lines) {
    if (any_changed && line.change_kind == ChangeKind::context) continue;
    for (CodeToken& tok : tokenize_code(line.content)) {
      out.push_back(std::move(tok.text));
    }
  }
  return out;
}

}  // namespace corerev::codelex
