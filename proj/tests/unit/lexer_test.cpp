// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "motepy/lexer.hpp"

using namespace motepy;
using namespace motepy::frontend;

namespace {

std::vector<TokenKind> kinds(const std::vector<Token>& toks) {
  std::vector<TokenKind> k;
  for (const auto& t : toks) k.push_back(t.kind);
  return k;
}

std::string lex_error(std::string_view src) {
  try {
    tokenize(src, 0);
  } catch (const CompileError& e) {
    return e.diagnostics().front().message;
  }
  return "";
}

}  // namespace

TEST(Lexer, FlowDecoratorAndBlock) {
  auto toks = tokenize("@flow\ndef f() -> void:\n    pass\n", 0);
  using K = TokenKind;
  std::vector<K> want = {K::Punctuation, K::Identifier, K::Newline, K::Keyword,     K::Identifier,
                         K::Punctuation, K::Punctuation, K::Operator, K::Identifier, K::Punctuation,
                         K::Newline,     K::Indent,      K::Keyword,  K::Newline,    K::Dedent,
                         K::EndOfFile};
  EXPECT_EQ(kinds(toks), want);
  EXPECT_EQ(toks[7].text, "->");
}

TEST(Lexer, CommentsAndBlankLinesProduceNothing) {
  auto toks = tokenize("# header\n\nx: float  # trailing\n   # indented comment\n", 0);
  using K = TokenKind;
  EXPECT_EQ(kinds(toks), (std::vector<K>{K::Identifier, K::Punctuation, K::Identifier, K::Newline, K::EndOfFile}));
}

TEST(Lexer, NewlinesInsideBracketsAreJoined) {
  auto toks = tokenize("printf(\"a %lu\\n\",\n        uint64_t(v))\n", 0);
  int newlines = 0;
  for (const auto& t : toks) newlines += t.kind == TokenKind::Newline;
  EXPECT_EQ(newlines, 1);
  EXPECT_EQ(toks[2].kind, TokenKind::StringLiteral);
  EXPECT_EQ(toks[2].text, "\"a %lu\\n\"");
}

TEST(Lexer, NumericLiterals) {
  auto toks = tokenize("a = 60 + 2.5 + 1e3 + .5\n", 0);
  EXPECT_EQ(toks[2].kind, TokenKind::IntLiteral);
  EXPECT_EQ(toks[4].kind, TokenKind::FloatLiteral);
  EXPECT_EQ(toks[6].kind, TokenKind::FloatLiteral);
  EXPECT_EQ(toks[8].kind, TokenKind::FloatLiteral);
  EXPECT_EQ(toks[8].text, ".5");
}

TEST(Lexer, KeywordsAreRecognised) {
  EXPECT_TRUE(is_keyword("def"));
  EXPECT_TRUE(is_keyword("for"));
  EXPECT_TRUE(is_keyword("return"));
  EXPECT_FALSE(is_keyword("next"));
  EXPECT_FALSE(is_keyword("float"));
  auto toks = tokenize("def\n", 0);
  EXPECT_EQ(toks[0].kind, TokenKind::Keyword);
}

TEST(Lexer, SpansAreOneBased) {
  auto toks = tokenize("x: float\n  \ny = 3\n", 7);
  const Token& y = toks[4];
  EXPECT_EQ(y.text, "y");
  EXPECT_EQ(y.span.file, 7u);
  EXPECT_EQ(y.span.line, 3u);
  EXPECT_EQ(y.span.col, 1u);
}

TEST(Lexer, DedentsClosedAtEndOfFile) {
  auto toks = tokenize("def f() -> void:\n  for i in range(0, 2):\n    pass", 0);
  int indents = 0, dedents = 0;
  for (const auto& t : toks) {
    indents += t.kind == TokenKind::Indent;
    dedents += t.kind == TokenKind::Dedent;
  }
  EXPECT_EQ(indents, 2);
  EXPECT_EQ(dedents, 2);
  EXPECT_EQ(toks.back().kind, TokenKind::EndOfFile);
}

TEST(Lexer, Errors) {
  EXPECT_NE(lex_error("def f() -> void:\n    pass\n  x = 1\n").find("unindent"), std::string::npos);
  EXPECT_NE(lex_error("s = \"abc\n").find("unterminated"), std::string::npos);
  EXPECT_NE(lex_error("x = 1 $ 2\n").find("unexpected character"), std::string::npos);
  EXPECT_NE(lex_error("x = \x01\n").find("unexpected byte"), std::string::npos);
  EXPECT_NE(lex_error("def f() -> void:\n\tpass\n        pass\n").find("indent"), std::string::npos);
}

TEST(Lexer, ErrorSpanPointsAtOffendingCharacter) {
  try {
    tokenize("a = 1\nb = 2 ? 3\n", 4);
    FAIL() << "expected a lexer error";
  } catch (const CompileError& e) {
    const SourceSpan& s = e.diagnostics().front().span;
    EXPECT_EQ(s.file, 4u);
    EXPECT_EQ(s.line, 2u);
    EXPECT_EQ(s.col, 7u);
  }
}

// Arbitrary bytes either tokenize or raise a positioned CompileError.
TEST(Lexer, TotalOnArbitraryInput) {
  std::mt19937_64 rng(20260101);
  const std::string alphabet = "abcxyz019 \t\n\r#:()[],.@+-*/=<>\"'\\_\x01\xff";
  for (int iter = 0; iter < 20000; ++iter) {
    std::string src;
    int len = static_cast<int>(rng() % 64);
    for (int i = 0; i < len; ++i) {
      if (rng() % 8 == 0)
        src.push_back(static_cast<char>(rng() % 256));
      else
        src.push_back(alphabet[rng() % alphabet.size()]);
    }
    try {
      auto toks = tokenize(src, 0);
      ASSERT_FALSE(toks.empty());
      ASSERT_EQ(toks.back().kind, TokenKind::EndOfFile);
    } catch (const CompileError& e) {
      ASSERT_FALSE(e.diagnostics().empty());
      const SourceSpan& s = e.diagnostics().front().span;
      ASSERT_GE(s.line, 1u);
      ASSERT_GE(s.col, 1u);
    }
  }
}
