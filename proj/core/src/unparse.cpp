// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "motepy/parser.hpp"

namespace motepy::frontend {

namespace {

void indent(std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "    ";
}

void unparse_stmt(std::ostringstream& os, const ast::Stmt& s, int depth) {
  indent(os, depth);
  switch (s.kind) {
    case ast::StmtKind::Pass:
      os << "pass\n";
      return;
    case ast::StmtKind::Return:
      os << "return";
      if (s.value) os << ' ' << unparse(*s.value);
      os << '\n';
      return;
    case ast::StmtKind::Decl:
      os << s.name << ": " << unparse(s.decl_type);
      if (s.value) os << " = " << unparse(*s.value);
      os << '\n';
      return;
    case ast::StmtKind::Assign:
      os << s.name << " = " << unparse(*s.value) << '\n';
      return;
    case ast::StmtKind::ElemAssign:
      os << s.name;
      for (const auto& i : s.indices) os << '[' << unparse(*i) << ']';
      os << " = " << unparse(*s.value) << '\n';
      return;
    case ast::StmtKind::ExprStmt:
      os << unparse(*s.value) << '\n';
      return;
    case ast::StmtKind::For:
      os << "for " << s.name << " in range(" << unparse(*s.lower) << ", " << unparse(*s.upper)
         << "):\n";
      for (const auto& b : s.body) unparse_stmt(os, *b, depth + 1);
      return;
  }
}

bool equal_type(const ast::TypeExpr& a, const ast::TypeExpr& b) {
  if (a.base != b.base || a.is_const != b.is_const || a.dims.size() != b.dims.size()) return false;
  for (std::size_t i = 0; i < a.dims.size(); ++i) {
    if (a.dims[i].name != b.dims[i].name || a.dims[i].value != b.dims[i].value) return false;
  }
  return true;
}

bool equal_opt(const ast::ExprPtr& a, const ast::ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool equal_body(const std::vector<ast::StmtPtr>& a, const std::vector<ast::StmtPtr>& b);

bool equal_stmt(const ast::Stmt& a, const ast::Stmt& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (a.kind == ast::StmtKind::Decl && !equal_type(a.decl_type, b.decl_type)) return false;
  if (!equal_opt(a.value, b.value) || !equal_opt(a.lower, b.lower) || !equal_opt(a.upper, b.upper))
    return false;
  if (a.indices.size() != b.indices.size()) return false;
  for (std::size_t i = 0; i < a.indices.size(); ++i)
    if (!structurally_equal(*a.indices[i], *b.indices[i])) return false;
  return equal_body(a.body, b.body);
}

bool equal_body(const std::vector<ast::StmtPtr>& a, const std::vector<ast::StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal_stmt(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

std::string unparse(const ast::TypeExpr& t) {
  std::string s = t.is_const ? "const " : "";
  s += t.base;
  for (const auto& d : t.dims) s += "[" + (d.name.empty() ? std::to_string(d.value) : d.name) + "]";
  return s;
}

std::string unparse(const ast::Expr& e) {
  switch (e.kind) {
    case ast::ExprKind::IntLit:
      return e.text.empty() ? std::to_string(e.int_value) : e.text;
    case ast::ExprKind::FloatLit:
    case ast::ExprKind::StrLit:
    case ast::ExprKind::Name:
      return e.text;
    case ast::ExprKind::Index: {
      std::string s = unparse(*e.operands[0]);
      for (std::size_t i = 1; i < e.operands.size(); ++i) s += "[" + unparse(*e.operands[i]) + "]";
      return s;
    }
    case ast::ExprKind::Binary:
      return "(" + unparse(*e.operands[0]) + " " + ast::binary_op_text(e.op) + " " +
             unparse(*e.operands[1]) + ")";
    case ast::ExprKind::Call:
    case ast::ExprKind::Cast: {
      std::string s = e.text + "(";
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) s += ", ";
        s += unparse(*e.operands[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

std::string unparse(const ast::Module& m) {
  std::ostringstream os;
  for (const auto& g : m.globals) {
    os << g.name << ": " << unparse(g.type);
    if (g.init) os << " = " << unparse(*g.init);
    os << '\n';
  }
  for (const auto& f : m.functions) {
    os << '\n';
    for (const auto& d : f.decorators) os << '@' << d.name << '\n';
    os << "def " << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << f.params[i].name << ": " << unparse(f.params[i].type);
    }
    os << ") -> " << unparse(f.return_type) << ":\n";
    for (const auto& s : f.body) unparse_stmt(os, *s, 1);
  }
  return os.str();
}

std::string unparse(const ast::PipelineSpec& spec) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    os << spec.stages[i].module << '.' << spec.stages[i].function;
    os << (i + 1 < spec.stages.size() ? ",\n" : "\n");
  }
  os << "]\n";
  return os.str();
}

bool structurally_equal(const ast::Expr& a, const ast::Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.operands.size() != b.operands.size()) return false;
  if (a.kind == ast::ExprKind::IntLit && a.int_value != b.int_value) return false;
  if (a.kind == ast::ExprKind::Binary && a.op != b.op) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!structurally_equal(*a.operands[i], *b.operands[i])) return false;
  return true;
}

bool structurally_equal(const ast::Module& a, const ast::Module& b) {
  if (a.name != b.name || a.globals.size() != b.globals.size() ||
      a.functions.size() != b.functions.size())
    return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    const auto& ga = a.globals[i];
    const auto& gb = b.globals[i];
    if (ga.name != gb.name || !equal_type(ga.type, gb.type) || !equal_opt(ga.init, gb.init))
      return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || fa.params.size() != fb.params.size() ||
        !equal_type(fa.return_type, fb.return_type) || fa.decorators.size() != fb.decorators.size())
      return false;
    for (std::size_t p = 0; p < fa.params.size(); ++p)
      if (fa.params[p].name != fb.params[p].name || !equal_type(fa.params[p].type, fb.params[p].type))
        return false;
    for (std::size_t d = 0; d < fa.decorators.size(); ++d)
      if (fa.decorators[d].name != fb.decorators[d].name) return false;
    if (!equal_body(fa.body, fb.body)) return false;
  }
  return true;
}

}  // namespace motepy::frontend
