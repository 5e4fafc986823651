// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "motepy/diagnostics.hpp"

namespace motepy::frontend {

enum class TokenKind {
  Identifier,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  Keyword,
  Operator,     // + - * / = ->
  Punctuation,  // ( ) [ ] , : . @
  Newline,
  Indent,
  Dedent,
  EndOfFile,
};

const char* token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  // Verbatim lexeme. String literals keep their quotes and escape sequences
  // untouched so they can be passed through to C.
  std::string text;
  SourceSpan span;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

/// Splits `source` into tokens, ending with EndOfFile. Indentation is turned
/// into Indent/Dedent tokens; newlines inside brackets are continuations.
/// Throws CompileError on malformed input and never crashes on arbitrary
/// bytes.
std::vector<Token> tokenize(std::string_view source, FileId file);

bool is_keyword(std::string_view word);

}  // namespace motepy::frontend
