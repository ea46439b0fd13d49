// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "corerev/codelex/diff.hpp"
#include "corerev/codelex/lexer.hpp"
#include "corerev/random.hpp"
#include "golden.hpp"

using namespace corerev;
using namespace corerev::codelex;

namespace {

std::vector<std::string> texts(std::string_view src) {
  std::vector<std::string> out;
  for (auto& t : tokenize_code(src)) out.push_back(t.text);
  return out;
}

bool space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Walks the input next to the token stream: after skipping whitespace, each
// token must be the very next bytes. Fails if a byte is lost or invented.
::testing::AssertionResult covers_input(std::string_view src, const std::vector<CodeToken>& toks) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    while (pos < src.size() && space(src[pos])) ++pos;
    if (toks[i].text.empty()) return ::testing::AssertionFailure() << "empty token " << i;
    if (src.substr(pos, toks[i].text.size()) != toks[i].text) {
      return ::testing::AssertionFailure() << "token " << i << " '" << toks[i].text
                                           << "' not at offset " << pos;
    }
    pos += toks[i].text.size();
  }
  while (pos < src.size() && space(src[pos])) ++pos;
  if (pos != src.size()) return ::testing::AssertionFailure() << "stopped at " << pos;
  return ::testing::AssertionSuccess();
}

}  // namespace

TEST(SplitDiff, Examples) {
  EXPECT_EQ(split_diff("+ int x;"), (std::vector<DiffLine>{{ChangeKind::added, " int x;"}}));
  EXPECT_EQ(split_diff("- return a;\n  b();"),
            (std::vector<DiffLine>{{ChangeKind::removed, " return a;"},
                                   {ChangeKind::context, "  b();"}}));
  EXPECT_TRUE(split_diff("@@ -1,2 +1,2 @@").empty());
}

TEST(SplitDiff, GitHeadersAndLineEndings) {
  auto lines = split_diff("diff --git a/X.java b/X.java\n--- a/X.java\n+++ b/X.java\n"
                          "@@ -3 +3 @@ class X\r\n-a();\r\n+b();\n\\ No newline at end of file\n");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], (DiffLine{ChangeKind::removed, "a();"}));
  EXPECT_EQ(lines[1], (DiffLine{ChangeKind::added, "b();"}));
  EXPECT_TRUE(split_diff("").empty());
  EXPECT_EQ(split_diff("+\n").size(), 1u);
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(texts("private final int shuffleId;"),
            (std::vector<std::string>{"private", "final", "int", "shuffleId", ";"}));
  EXPECT_EQ(texts("a==b"), (std::vector<std::string>{"a", "==", "b"}));
  EXPECT_EQ(texts("x = \"s;\" ;"), (std::vector<std::string>{"x", "=", "\"s;\"", ";"}));
}

TEST(Tokenize, KindsOfTheIdentifierExample) {
  auto toks = tokenize_code("private final int shuffleId;");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(toks[0].kind, TokenKind::keyword);
  EXPECT_EQ(toks[2].kind, TokenKind::keyword);
  EXPECT_EQ(toks[3].kind, TokenKind::identifier);
  EXPECT_EQ(toks[4].kind, TokenKind::punctuation);
}

TEST(Tokenize, IdentifiersAreNotSplit) {
  auto toks = tokenize_code("deleteSnapshotListener $tmp _x9 inSyncAllocationIds");
  ASSERT_EQ(toks.size(), 4u);
  for (const auto& t : toks) EXPECT_EQ(t.kind, TokenKind::identifier) << t.text;
  EXPECT_EQ(toks[0].text, "deleteSnapshotListener");
}

TEST(Tokenize, KeywordsOnlyFromTheJavaSet) {
  for (const char* w : {"class", "synchronized", "instanceof", "null", "true"}) {
    EXPECT_TRUE(is_java_keyword(w)) << w;
    EXPECT_EQ(tokenize_code(w).at(0).kind, TokenKind::keyword) << w;
  }
  for (const char* w : {"String", "var", "record", "def", "Class", "classes"}) {
    EXPECT_FALSE(is_java_keyword(w)) << w;
    EXPECT_EQ(tokenize_code(w).at(0).kind, TokenKind::identifier) << w;
  }
}

TEST(Tokenize, Numbers) {
  for (const char* n : {"0", "42", "0x1F", "0b101", "1.5", "1.5e-3f", "10L", "3e8", "2.0d"}) {
    auto toks = tokenize_code(n);
    ASSERT_EQ(toks.size(), 1u) << n;
    EXPECT_EQ(toks[0].kind, TokenKind::number) << n;
    EXPECT_EQ(toks[0].text, n);
  }
  EXPECT_EQ(texts("x.y(1).z"), (std::vector<std::string>{"x", ".", "y", "(", "1", ")", ".", "z"}));
}

TEST(Tokenize, OperatorsMaximalMunch) {
  EXPECT_EQ(texts("a>>>=b"), (std::vector<std::string>{"a", ">>>=", "b"}));
  EXPECT_EQ(texts("i++ + ++j"), (std::vector<std::string>{"i", "++", "+", "++", "j"}));
  EXPECT_EQ(texts("x->y::z"), (std::vector<std::string>{"x", "->", "y", "::", "z"}));
  EXPECT_EQ(texts("a&&!b||c"), (std::vector<std::string>{"a", "&&", "!", "b", "||", "c"}));
  EXPECT_EQ(tokenize_code("<=").at(0).kind, TokenKind::op);
}

TEST(Tokenize, CommentsAreSingleTokens) {
  auto toks = tokenize_code("a; // trailing note\nb /* multi\nline */ c");
  ASSERT_EQ(toks.size(), 6u);
  EXPECT_EQ(toks[2], (CodeToken{TokenKind::comment, "// trailing note"}));
  EXPECT_EQ(toks[4], (CodeToken{TokenKind::comment, "/* multi\nline */"}));
}

TEST(Tokenize, UnterminatedRunsToEnd) {
  auto s = tokenize_code("x = \"never closed");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[2], (CodeToken{TokenKind::string_literal, "\"never closed"}));
  auto c = tokenize_code("y /* open comment");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].kind, TokenKind::comment);
  EXPECT_EQ(tokenize_code("'\\'").at(0).kind, TokenKind::string_literal);
  EXPECT_EQ(texts("s = \"a\\\"b\";"), (std::vector<std::string>{"s", "=", "\"a\\\"b\"", ";"}));
}

TEST(Tokenize, UnknownBytesBecomePunctuation) {
  auto toks = tokenize_code("a # b \xC3\xA9 `");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(toks[1], (CodeToken{TokenKind::punctuation, "#"}));
  EXPECT_EQ(toks[3], (CodeToken{TokenKind::punctuation, "\xC3\xA9"}));
  EXPECT_EQ(toks[4].text, "`");
}

TEST(Tokenize, EmptyAndWhitespace) {
  EXPECT_TRUE(tokenize_code("").empty());
  EXPECT_TRUE(tokenize_code(" \t\r\n ").empty());
}

// Random byte soup: the lexer must consume every byte exactly once.
TEST(Tokenize, TotalOnRandomInput) {
  const std::string alphabet = "abzAZ_$09 .;(){}[]<>=!&|+-*/%^~?:@,\"'\\\n\t#`\x80\xC3\xE2\xF0";
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    std::string src;
    std::size_t n = uniform_index(rng, 60);
    for (std::size_t i = 0; i < n; ++i) src += alphabet[uniform_index(rng, alphabet.size())];
    auto toks = tokenize_code(src);
    EXPECT_TRUE(covers_input(src, toks)) << "seed " << seed;
  }
}

// Joining lexable tokens with single spaces and re-lexing gives them back.
TEST(Tokenize, RoundTripStability) {
  const std::vector<std::string> pieces = {"int", "x", "=", "foo", "(", ")", ";", "==", ">>=",
                                           "->", "12", "0x7f", "\"s t\"", "'c'", "return",
                                           "a_b", "{", "}", ".", "++", "/* c */"};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::vector<std::string> picked;
    std::size_t n = 1 + uniform_index(rng, 20);
    std::string joined;
    for (std::size_t i = 0; i < n; ++i) {
      picked.push_back(pieces[uniform_index(rng, pieces.size())]);
      joined += (i ? " " : "") + picked.back();
    }
    auto first = texts(joined);
    EXPECT_EQ(first, picked) << joined;
    std::string again;
    for (std::size_t i = 0; i < first.size(); ++i) again += (i ? " " : "") + first[i];
    EXPECT_EQ(texts(again), first);
  }
}

TEST(CodeChangeTokens, BothKindsInFileOrder) {
  EXPECT_EQ(code_change_tokens("@@ -1 +1 @@\n-a();\n ctx;\n+b();\n"),
            (std::vector<std::string>{"a", "(", ")", ";", "b", "(", ")", ";"}));
}

TEST(CodeChangeTokens, ContextOnlyHunkKeepsContext) {
  EXPECT_EQ(code_change_tokens(" x = 1;\n"), (std::vector<std::string>{"x", "=", "1", ";"}));
  EXPECT_TRUE(code_change_tokens("").empty());
}

TEST(LexerGoldens, ListingFixturesBitExact) {
  auto goldens = testsupport::load_lexer_goldens(COREREV_FIXTURE_DIR "/lexer");
  ASSERT_GE(goldens.size(), 8u);
  for (const auto& g : goldens) EXPECT_EQ(testsupport::golden_mismatch(g), "") << g.name;
}
