// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/lexer.hpp"

#include <array>
#include <cctype>

namespace motepy::frontend {

namespace {

constexpr std::array kKeywords = {"def", "for", "in", "pass", "return", "const"};

// Largest accepted single indentation step, in spaces.
constexpr std::uint32_t kMaxIndentStep = 8;

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view src, FileId file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indentation()) continue;
      }
      lex_one();
    }
    if (line_has_tokens_) push(TokenKind::Newline, "", span_here(0));
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenKind::Dedent, "", span_here(0));
    }
    push(TokenKind::EndOfFile, "", span_here(0));
    return std::move(tokens_);
  }

 private:
  SourceSpan span_here(std::uint32_t length) const {
    return SourceSpan{file_, line_, col_, length};
  }

  [[noreturn]] void fail(SourceSpan span, std::string msg) const {
    throw CompileError(span, std::move(msg));
  }

  void push(TokenKind kind, std::string text, SourceSpan span) {
    tokens_.push_back(Token{kind, std::move(text), span});
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    pos_ += n;
    col_ += static_cast<std::uint32_t>(n);
  }

  void new_line() {
    ++pos_;
    ++line_;
    col_ = 1;
    at_line_start_ = true;
  }

  bool at_newline() const {
    return peek() == '\n' || (peek() == '\r' && peek(1) == '\n');
  }

  void consume_newline() {
    if (peek() == '\r') advance();
    new_line();
  }

  // Measures the indentation of a new logical line. Returns false when the
  // line was blank or comment-only and has been skipped entirely.
  bool handle_indentation() {
    std::uint32_t width = 0;
    bool saw_tab = false;
    bool saw_space = false;
    SourceSpan start = span_here(0);
    while (peek() == ' ' || peek() == '\t') {
      (peek() == '\t' ? saw_tab : saw_space) = true;
      ++width;
      advance();
    }
    if (pos_ >= src_.size()) return false;
    if (peek() == '#') {
      while (pos_ < src_.size() && !at_newline()) advance();
      if (pos_ < src_.size()) consume_newline();
      return false;
    }
    if (at_newline()) {
      consume_newline();
      return false;
    }
    at_line_start_ = false;
    start.length = width;
    if (saw_tab) {
      fail(start, saw_space ? "inconsistent use of tabs and spaces in indentation"
                            : "tab characters are not allowed in indentation");
    }
    std::uint32_t top = indents_.back();
    if (width > top) {
      if (width - top > kMaxIndentStep)
        fail(start, "indentation step of " + std::to_string(width - top) +
                        " spaces exceeds the maximum of 8");
      indents_.push_back(width);
      push(TokenKind::Indent, "", start);
    } else if (width < top) {
      while (indents_.back() > width) {
        indents_.pop_back();
        push(TokenKind::Dedent, "", start);
      }
      if (indents_.back() != width)
        fail(start, "unindent does not match any outer indentation level");
    }
    return true;
  }

  void lex_one() {
    char c = peek();
    if (c == ' ' || c == '\t') {
      advance();
      return;
    }
    if (c == '#') {
      while (pos_ < src_.size() && !at_newline()) advance();
      return;
    }
    if (at_newline()) {
      SourceSpan sp = span_here(1);
      if (depth_ == 0 && line_has_tokens_) {
        push(TokenKind::Newline, "", sp);
        line_has_tokens_ = false;
      }
      consume_newline();
      // Continuation lines inside brackets carry no indentation meaning.
      if (depth_ > 0) at_line_start_ = false;
      return;
    }
    if (c == '\r') fail(span_here(1), "stray carriage return");
    line_has_tokens_ = true;

    if (ident_start(c)) {
      SourceSpan sp = span_here(0);
      std::size_t begin = pos_;
      while (ident_char(peek())) advance();
      std::string word(src_.substr(begin, pos_ - begin));
      sp.length = static_cast<std::uint32_t>(word.size());
      TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      push(kind, std::move(word), sp);
      return;
    }
    if (digit(c) || (c == '.' && digit(peek(1)))) {
      lex_number();
      return;
    }
    if (c == '"' || c == '\'') {
      lex_string(c);
      return;
    }
    if (c == '-' && peek(1) == '>') {
      push(TokenKind::Operator, "->", span_here(2));
      advance(2);
      return;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '=':
        push(TokenKind::Operator, std::string(1, c), span_here(1));
        advance();
        return;
      case '(': case '[':
        ++depth_;
        push(TokenKind::Punctuation, std::string(1, c), span_here(1));
        advance();
        return;
      case ')': case ']':
        if (depth_ > 0) --depth_;
        push(TokenKind::Punctuation, std::string(1, c), span_here(1));
        advance();
        return;
      case ',': case ':': case '.': case '@':
        push(TokenKind::Punctuation, std::string(1, c), span_here(1));
        advance();
        return;
      default:
        break;
    }
    unsigned char uc = static_cast<unsigned char>(c);
    if (uc < 0x20 || uc >= 0x7f) {
      fail(span_here(1), "unexpected byte 0x" + hex_byte(uc));
    }
    fail(span_here(1), std::string("unexpected character '") + c + "'");
  }

  static std::string hex_byte(unsigned char b) {
    const char* digits = "0123456789abcdef";
    return {digits[b >> 4], digits[b & 0xf]};
  }

  void lex_number() {
    SourceSpan sp = span_here(0);
    std::size_t begin = pos_;
    bool is_float = false;
    while (digit(peek())) advance();
    if (peek() == '.') {
      is_float = true;
      advance();
      while (digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t ahead = 1;
      if (peek(1) == '+' || peek(1) == '-') ahead = 2;
      if (digit(peek(ahead))) {
        is_float = true;
        advance(ahead);
        while (digit(peek())) advance();
      }
    }
    if (ident_char(peek()) || peek() == '.') {
      sp.length = static_cast<std::uint32_t>(pos_ - begin + 1);
      fail(sp, "malformed numeric literal");
    }
    std::string text(src_.substr(begin, pos_ - begin));
    sp.length = static_cast<std::uint32_t>(text.size());
    push(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, std::move(text), sp);
  }

  void lex_string(char quote) {
    SourceSpan sp = span_here(0);
    std::size_t begin = pos_;
    advance();
    for (;;) {
      if (pos_ >= src_.size() || at_newline() || peek() == '\r') {
        sp.length = static_cast<std::uint32_t>(pos_ - begin);
        fail(sp, "unterminated string literal");
      }
      char c = peek();
      if (c == '\\') {
        if (pos_ + 1 >= src_.size() || peek(1) == '\n' || peek(1) == '\r') {
          sp.length = static_cast<std::uint32_t>(pos_ - begin + 1);
          fail(sp, "unterminated string literal");
        }
        advance(2);
        continue;
      }
      advance();
      if (c == quote) break;
    }
    std::string text(src_.substr(begin, pos_ - begin));
    sp.length = static_cast<std::uint32_t>(text.size());
    push(TokenKind::StringLiteral, std::move(text), sp);
  }

  std::string_view src_;
  FileId file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<std::uint32_t> indents_{0};
  std::vector<Token> tokens_;
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntLiteral: return "integer literal";
    case TokenKind::FloatLiteral: return "float literal";
    case TokenKind::StringLiteral: return "string literal";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Newline: return "newline";
    case TokenKind::Indent: return "indent";
    case TokenKind::Dedent: return "dedent";
    case TokenKind::EndOfFile: return "end of file";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (const char* k : kKeywords)
    if (word == k) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view source, FileId file) {
  return Lexer(source, file).run();
}

}  // namespace motepy::frontend
