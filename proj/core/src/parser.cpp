// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/parser.hpp"

#include <charconv>
#include <set>
#include <utility>

namespace motepy::ast {

const char* binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

}  // namespace motepy::ast

namespace motepy::frontend {

using ast::Expr;
using ast::ExprKind;
using ast::ExprPtr;
using ast::Stmt;
using ast::StmtKind;
using ast::StmtPtr;

namespace {

bool is_cast_name(const std::string& s) {
  return s == "float" || s == "int32_t" || s == "int64_t" || s == "uint64_t";
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (toks_.empty() || toks_.back().kind != TokenKind::EndOfFile)
      throw CompileError(SourceSpan{}, "token stream does not end in end-of-file");
  }

  ast::Module module(std::string name) {
    ast::Module m;
    m.name = std::move(name);
    m.file = cur().span.file;
    skip_newlines();
    while (!at(TokenKind::EndOfFile)) {
      if (at_punct("@") || at_keyword("def")) {
        m.functions.push_back(function_def());
      } else if (at(TokenKind::Identifier) && peek_is_punct(1, ":")) {
        m.globals.push_back(global_decl());
      } else {
        fail(cur().span, "expected a global declaration or function definition, found " +
                             describe(cur()));
      }
      skip_newlines();
    }
    return m;
  }

  ast::PipelineSpec pipeline() {
    ast::PipelineSpec spec;
    spec.file = cur().span.file;
    skip_newlines();
    if (!at_punct("["))
      fail(cur().span, "pipeline specification must be a list of module.function entries");
    SourceSpan open = take().span;
    std::set<std::pair<std::string, std::string>> seen;
    while (!at_punct("]")) {
      if (!at(TokenKind::Identifier))
        fail(cur().span, "expected a module.function entry, found " + describe(cur()));
      ast::PipelineStage st;
      st.span = cur().span;
      st.module = take().text;
      if (!at_punct("."))
        fail(cur().span, "pipeline entry '" + st.module + "' is not of the form module.function");
      take();
      if (!at(TokenKind::Identifier))
        fail(cur().span, "expected a function name after '" + st.module + ".'");
      st.function = take().text;
      st.span.length = cur().span.col > st.span.col && cur().span.line == st.span.line
                           ? cur().span.col - st.span.col
                           : st.span.length;
      if (!seen.insert({st.module, st.function}).second)
        fail(st.span, "duplicate pipeline stage " + st.module + "." + st.function);
      spec.stages.push_back(std::move(st));
      if (at_punct(",")) {
        take();
        continue;
      }
      if (!at_punct("]")) fail(cur().span, "expected ',' or ']' in pipeline list");
    }
    take();
    if (spec.stages.empty()) fail(open, "pipeline specification is empty");
    skip_newlines();
    if (!at(TokenKind::EndOfFile))
      fail(cur().span, "unexpected " + describe(cur()) + " after pipeline list");
    return spec;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return cur().kind == k; }
  bool at_punct(const char* p) const { return cur().is(TokenKind::Punctuation, p); }
  bool at_op(const char* p) const { return cur().is(TokenKind::Operator, p); }
  bool at_keyword(const char* k) const { return cur().is(TokenKind::Keyword, k); }
  bool peek_is_punct(std::size_t n, const char* p) const {
    return peek(n).is(TokenKind::Punctuation, p);
  }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(SourceSpan span, std::string msg) {
    throw CompileError(span, std::move(msg));
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Newline:
      case TokenKind::Indent:
      case TokenKind::Dedent:
      case TokenKind::EndOfFile:
        return token_kind_name(t.kind);
      default:
        return std::string(token_kind_name(t.kind)) + " '" + t.text + "'";
    }
  }

  const Token& expect_punct(const char* p) {
    if (!at_punct(p)) fail(cur().span, std::string("expected '") + p + "', found " + describe(cur()));
    return take();
  }

  const Token& expect_ident(const char* what) {
    if (!at(TokenKind::Identifier))
      fail(cur().span, std::string("expected ") + what + ", found " + describe(cur()));
    return take();
  }

  void expect_newline() {
    if (at(TokenKind::EndOfFile)) return;
    if (!at(TokenKind::Newline)) fail(cur().span, "expected end of line, found " + describe(cur()));
    take();
  }

  void skip_newlines() {
    while (at(TokenKind::Newline)) take();
  }

  ast::TypeExpr type_expr() {
    ast::TypeExpr t;
    t.span = cur().span;
    if (at_keyword("const")) {
      take();
      t.is_const = true;
    }
    t.base = expect_ident("a type name").text;
    while (at_punct("[")) {
      SourceSpan open = take().span;
      ast::DimExpr d;
      d.span = cur().span;
      if (at(TokenKind::IntLiteral)) {
        d.value = parse_int(cur());
        take();
      } else if (at(TokenKind::Identifier)) {
        d.name = take().text;
      } else {
        fail(cur().span, "array extent must be an integer literal or a constant name");
      }
      expect_punct("]");
      t.dims.push_back(std::move(d));
      if (t.dims.size() > 2) fail(open, "array rank beyond 2 is unsupported");
    }
    return t;
  }

  static std::int64_t parse_int(const Token& t) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      fail(t.span, "integer literal '" + t.text + "' is out of range");
    return v;
  }

  ast::GlobalDecl global_decl() {
    ast::GlobalDecl g;
    g.span = cur().span;
    g.name = take().text;
    expect_punct(":");
    g.type = type_expr();
    if (at_op("=")) {
      take();
      g.init = expr();
    }
    expect_newline();
    return g;
  }

  ast::FunctionDef function_def() {
    ast::FunctionDef f;
    while (at_punct("@")) {
      SourceSpan at_span = take().span;
      const Token& name = expect_ident("a decorator name");
      if (name.text != "flow") fail(name.span, "unknown decorator '@" + name.text + "'");
      if (f.has_decorator(name.text)) fail(name.span, "duplicate decorator '@" + name.text + "'");
      f.decorators.push_back({name.text, at_span});
      expect_newline();
      skip_newlines();
    }
    if (!at_keyword("def")) fail(cur().span, "expected 'def' after decorator");
    f.span = take().span;
    const Token& name = expect_ident("a function name");
    f.name = name.text;
    f.span = name.span;
    expect_punct("(");
    while (!at_punct(")")) {
      ast::Param p;
      p.span = cur().span;
      p.name = expect_ident("a parameter name").text;
      expect_punct(":");
      p.type = type_expr();
      f.params.push_back(std::move(p));
      if (at_punct(",")) {
        take();
        continue;
      }
      if (!at_punct(")")) fail(cur().span, "expected ',' or ')' in parameter list");
    }
    take();
    if (at_op("->")) {
      take();
      f.return_type = type_expr();
    } else {
      f.return_type.base = "void";
      f.return_type.span = cur().span;
    }
    expect_punct(":");
    f.body = block();
    return f;
  }

  std::vector<StmtPtr> block() {
    std::vector<StmtPtr> body;
    if (!at(TokenKind::Newline)) {
      // Single simple statement on the header line.
      body.push_back(simple_stmt());
      return body;
    }
    take();
    if (!at(TokenKind::Indent)) fail(cur().span, "expected an indented block");
    take();
    while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) body.push_back(statement());
    if (at(TokenKind::Dedent)) take();
    return body;
  }

  StmtPtr statement() {
    if (at_keyword("for")) return for_stmt();
    if (at(TokenKind::Indent)) fail(cur().span, "unexpected indent");
    if (at_punct("@") || at_keyword("def")) fail(cur().span, "nested functions are not supported");
    return simple_stmt();
  }

  StmtPtr simple_stmt() {
    auto s = std::make_unique<Stmt>();
    s->span = cur().span;
    if (at_keyword("pass")) {
      take();
      s->kind = StmtKind::Pass;
    } else if (at_keyword("return")) {
      take();
      s->kind = StmtKind::Return;
      if (!at(TokenKind::Newline) && !at(TokenKind::EndOfFile)) s->value = expr();
    } else if (at(TokenKind::Identifier) && peek_is_punct(1, ":")) {
      s->kind = StmtKind::Decl;
      s->name_span = cur().span;
      s->name = take().text;
      take();
      s->decl_type = type_expr();
      if (at_op("=")) {
        take();
        s->value = expr();
      }
    } else if (at_keyword("for")) {
      fail(cur().span, "'for' must start its own line");
    } else {
      ExprPtr lhs = expr();
      if (at_op("=")) {
        take();
        if (lhs->kind == ExprKind::Name) {
          s->kind = StmtKind::Assign;
          s->name = lhs->text;
          s->name_span = lhs->span;
        } else if (lhs->kind == ExprKind::Index) {
          s->kind = StmtKind::ElemAssign;
          s->name = lhs->operands[0]->text;
          s->name_span = lhs->operands[0]->span;
          for (std::size_t i = 1; i < lhs->operands.size(); ++i)
            s->indices.push_back(std::move(lhs->operands[i]));
        } else {
          fail(lhs->span, "invalid assignment target");
        }
        s->value = expr();
      } else {
        s->kind = StmtKind::ExprStmt;
        s->value = std::move(lhs);
      }
    }
    expect_newline();
    return s;
  }

  StmtPtr for_stmt() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::For;
    s->span = take().span;
    s->name_span = cur().span;
    s->name = expect_ident("a loop variable").text;
    if (!at_keyword("in")) fail(cur().span, "expected 'in' in for statement");
    take();
    const Token& r = expect_ident("'range'");
    if (r.text != "range") fail(r.span, "only 'for ... in range(...)' loops are supported");
    expect_punct("(");
    ExprPtr first = expr();
    if (at_punct(",")) {
      take();
      s->lower = std::move(first);
      s->upper = expr();
    } else {
      auto zero = std::make_unique<Expr>();
      zero->kind = ExprKind::IntLit;
      zero->span = first->span;
      zero->text = "0";
      s->lower = std::move(zero);
      s->upper = std::move(first);
    }
    expect_punct(")");
    expect_punct(":");
    s->body = block();
    if (s->body.empty()) fail(s->span, "loop body is empty");
    return s;
  }

  ExprPtr make_binary(ast::BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Binary;
    e->op = op;
    e->span = span;
    e->operands.push_back(std::move(lhs));
    e->operands.push_back(std::move(rhs));
    return e;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (at_op("+") || at_op("-")) {
      const Token& op = take();
      ExprPtr rhs = term();
      lhs = make_binary(op.text == "+" ? ast::BinaryOp::Add : ast::BinaryOp::Sub, std::move(lhs),
                        std::move(rhs), op.span);
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (at_op("*") || at_op("/")) {
      const Token& op = take();
      ExprPtr rhs = unary();
      lhs = make_binary(op.text == "*" ? ast::BinaryOp::Mul : ast::BinaryOp::Div, std::move(lhs),
                        std::move(rhs), op.span);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (!at_op("-")) return primary();
    SourceSpan minus = take().span;
    ExprPtr operand = unary();
    // Negative literals fold; anything else becomes `0 - x`.
    if (operand->kind == ExprKind::IntLit && operand->text.empty() == false &&
        operand->text[0] != '-') {
      operand->int_value = -operand->int_value;
      operand->text = "-" + operand->text;
      operand->span = minus;
      return operand;
    }
    if (operand->kind == ExprKind::FloatLit && operand->text[0] != '-') {
      operand->text = "-" + operand->text;
      operand->span = minus;
      return operand;
    }
    auto zero = std::make_unique<Expr>();
    zero->kind = ExprKind::IntLit;
    zero->text = "0";
    zero->span = minus;
    return make_binary(ast::BinaryOp::Sub, std::move(zero), std::move(operand), minus);
  }

  ExprPtr primary() {
    auto e = std::make_unique<Expr>();
    e->span = cur().span;
    if (at(TokenKind::IntLiteral)) {
      e->kind = ExprKind::IntLit;
      e->int_value = parse_int(cur());
      e->text = take().text;
      return e;
    }
    if (at(TokenKind::FloatLiteral)) {
      e->kind = ExprKind::FloatLit;
      e->text = take().text;
      return e;
    }
    if (at(TokenKind::StringLiteral)) {
      e->kind = ExprKind::StrLit;
      e->text = take().text;
      return e;
    }
    if (at_punct("(")) {
      take();
      ExprPtr inner = expr();
      expect_punct(")");
      return inner;
    }
    if (!at(TokenKind::Identifier)) fail(cur().span, "expected an expression, found " + describe(cur()));
    e->text = take().text;
    if (at_punct("(")) {
      take();
      e->kind = is_cast_name(e->text) ? ExprKind::Cast : ExprKind::Call;
      while (!at_punct(")")) {
        e->operands.push_back(expr());
        if (at_punct(",")) {
          take();
          continue;
        }
        if (!at_punct(")")) fail(cur().span, "expected ',' or ')' in argument list");
      }
      take();
      if (e->kind == ExprKind::Cast && e->operands.size() != 1)
        fail(e->span, "cast to " + e->text + " takes exactly one argument");
      if (at_punct("[")) fail(cur().span, "indexing a call result is not supported");
      return e;
    }
    if (!at_punct("[")) {
      e->kind = ExprKind::Name;
      return e;
    }
    e->kind = ExprKind::Name;
    auto base = std::move(e);
    auto idx = std::make_unique<Expr>();
    idx->kind = ExprKind::Index;
    idx->span = base->span;
    idx->operands.push_back(std::move(base));
    while (at_punct("[")) {
      SourceSpan open = take().span;
      idx->operands.push_back(expr());
      expect_punct("]");
      if (idx->operands.size() > 3) fail(open, "array rank beyond 2 is unsupported");
    }
    return idx;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ast::Module parse_module(const std::vector<Token>& tokens, std::string name) {
  return Parser(tokens).module(std::move(name));
}

ast::PipelineSpec parse_pipeline(const std::vector<Token>& tokens) {
  return Parser(tokens).pipeline();
}

}  // namespace motepy::frontend
