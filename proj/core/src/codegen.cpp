// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/codegen.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace motepy {

namespace {

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string index_suffix(const Type& t) { return t.rank() == 1 ? "[mp_i]" : "[mp_i][mp_j]"; }

// Loop nest over every element of `t` in row-major order; `stmt` may use the
// indices through index_suffix(t).
std::string element_loops(const Type& t, const std::string& stmt, int indent) {
  std::string s = pad(indent) + "for (int32_t mp_i = 0; mp_i < " + std::to_string(t.dims[0]) + "; ++mp_i)\n";
  if (t.rank() == 2) {
    s += pad(indent + 1) + "for (int32_t mp_j = 0; mp_j < " + std::to_string(t.dims[1]) + "; ++mp_j)\n";
    s += pad(indent + 2) + stmt + "\n";
  } else {
    s += pad(indent + 1) + stmt + "\n";
  }
  return s;
}

std::string c_type(const Type& t) { return scalar_c_name(t.scalar); }

std::string cast(ScalarKind k, const std::string& e) {
  return std::string("(") + scalar_c_name(k) + ")(" + e + ")";
}

}  // namespace

std::string c_float_literal(float v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s + "f";
}

std::string lower_fill(const CArray& target, const std::string& scalar, int indent) {
  std::string s = pad(indent) + "{\n";
  s += pad(indent + 1) + "const " + c_type(target.type) + " mp_v = " + cast(target.type.scalar, scalar) + ";\n";
  s += element_loops(target.type, target.base + index_suffix(target.type) + " = mp_v;", indent + 1);
  return s + pad(indent) + "}\n";
}

std::string lower_elementwise(const CArray& target, const CArray& lhs, ast::BinaryOp op,
                              const CArray& rhs, int indent) {
  std::string idx = index_suffix(target.type);
  std::string stmt = target.base + idx + " = " + lhs.base + idx + " " + ast::binary_op_text(op) + " " +
                     rhs.base + idx + ";";
  return pad(indent) + "{\n" + element_loops(target.type, stmt, indent + 1) + pad(indent) + "}\n";
}

std::string lower_contraction(const std::string& target, ScalarKind target_kind, const CArray& lhs,
                              const CArray& rhs, int indent) {
  const auto& a = lhs.type.dims;
  const auto& b = rhs.type.dims;
  std::string s = pad(indent) + "{\n";
  if (a.size() == 1 && b.size() == 1) {
    s += pad(indent + 1) + "float mp_acc = 0.0f;\n";
    s += pad(indent + 1) + "for (int32_t mp_i = 0; mp_i < " + std::to_string(a[0]) + "; ++mp_i)\n";
    s += pad(indent + 2) + "mp_acc = mp_acc + " + lhs.base + "[mp_i] * " + rhs.base + "[mp_i];\n";
    s += pad(indent + 1) + target + " = " + cast(target_kind, "mp_acc") + ";\n";
  } else if (a.size() == 1 && b.size() == 2) {
    s += pad(indent + 1) + "for (int32_t mp_j = 0; mp_j < " + std::to_string(b[1]) + "; ++mp_j) {\n";
    s += pad(indent + 2) + "float mp_acc = 0.0f;\n";
    s += pad(indent + 2) + "for (int32_t mp_i = 0; mp_i < " + std::to_string(a[0]) + "; ++mp_i)\n";
    s += pad(indent + 3) + "mp_acc = mp_acc + " + lhs.base + "[mp_i] * " + rhs.base + "[mp_i][mp_j];\n";
    s += pad(indent + 2) + target + "[mp_j] = mp_acc;\n";
    s += pad(indent + 1) + "}\n";
  } else if (a.size() == 2 && b.size() == 1) {
    s += pad(indent + 1) + "for (int32_t mp_i = 0; mp_i < " + std::to_string(a[0]) + "; ++mp_i) {\n";
    s += pad(indent + 2) + "float mp_acc = 0.0f;\n";
    s += pad(indent + 2) + "for (int32_t mp_j = 0; mp_j < " + std::to_string(a[1]) + "; ++mp_j)\n";
    s += pad(indent + 3) + "mp_acc = mp_acc + " + lhs.base + "[mp_i][mp_j] * " + rhs.base + "[mp_j];\n";
    s += pad(indent + 2) + target + "[mp_i] = mp_acc;\n";
    s += pad(indent + 1) + "}\n";
  } else {
    throw std::logic_error("lower_contraction: unsupported operand ranks");
  }
  return s + pad(indent) + "}\n";
}

namespace {

class Emitter {
 public:
  Emitter(const TypedProgram& p, const ArenaLayout& l) : prog_(p), layout_(l) {}

  std::string symbol_name(const Symbol* s) const {
    switch (s->storage) {
      case Storage::Arena:
        return prog_.arena_objects.at(s->arena_object).c_name;
      case Storage::Constant:
        return s->module + "__" + s->name;
      default:
        return s->name;
    }
  }

  CArray array_of(const ast::Expr& e) const {
    if (e.kind != ast::ExprKind::Name || !e.symbol)
      throw std::logic_error("codegen: array operand is not a name");
    return {symbol_name(e.symbol), e.symbol->type};
  }

  std::string expr(const ast::Expr& e) const {
    switch (e.kind) {
      case ast::ExprKind::IntLit: {
        if (e.type.scalar == ScalarKind::Int32) {
          if (e.int_value == std::numeric_limits<std::int32_t>::min()) return "(-2147483647 - 1)";
          return e.int_value < 0 ? "(" + std::to_string(e.int_value) + ")" : std::to_string(e.int_value);
        }
        if (e.int_value == std::numeric_limits<std::int64_t>::min()) return "INT64_MIN";
        return "INT64_C(" + std::to_string(e.int_value) + ")";
      }
      case ast::ExprKind::FloatLit: {
        std::string t = e.text + "f";
        return t[0] == '-' ? "(" + t + ")" : t;
      }
      case ast::ExprKind::StrLit:
        return e.text;
      case ast::ExprKind::Name:
        if (e.symbol) return symbol_name(e.symbol);
        if (e.external) return e.external->c_name;
        throw std::logic_error("codegen: unresolved name " + e.text);
      case ast::ExprKind::Index: {
        std::string s = symbol_name(e.operands[0]->symbol);
        for (std::size_t i = 1; i < e.operands.size(); ++i) s += "[" + expr(*e.operands[i]) + "]";
        return s;
      }
      case ast::ExprKind::Binary:
        if (e.array_op != ast::ArrayOp::None || e.type.is_array())
          throw std::logic_error("codegen: array expression in scalar context");
        return "(" + expr(*e.operands[0]) + " " + ast::binary_op_text(e.op) + " " + expr(*e.operands[1]) + ")";
      case ast::ExprKind::Cast: {
        const ast::Expr& a = *e.operands[0];
        if (a.type.is_array()) return "((uint64_t)(uintptr_t)(" + symbol_name(a.symbol) + "))";
        return "(" + cast(e.type.scalar, expr(a)) + ")";
      }
      case ast::ExprKind::Call:
        return call(e);
    }
    return "";
  }

  std::string call(const ast::Expr& e) const {
    std::string name;
    std::vector<std::string> args;
    switch (e.call_target) {
      case ast::CallTarget::Function:
      case ast::CallTarget::Next: {
        const FunctionInfo* f = e.call_target == ast::CallTarget::Function ? e.callee : next_target_;
        if (!f) throw std::logic_error("codegen: next() without a downstream stage");
        name = f->mangled;
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          const Type& pt = f->params[i]->type;
          args.push_back(pt.is_array() ? array_of(*e.operands[i]).base
                                       : cast(pt.scalar, expr(*e.operands[i])));
        }
        break;
      }
      case ast::CallTarget::Extern: {
        const ExternInfo* x = e.external;
        name = x->c_name;
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          const ast::Expr& a = *e.operands[i];
          if (a.type.is_array()) {
            std::string ptr = i < x->params.size() ? std::string(scalar_c_name(a.type.scalar)) + " *" : "void *";
            args.push_back("((" + ptr + ")(" + array_of(a).base + "))");
          } else if (i < x->params.size() && x->params[i].is_scalar()) {
            args.push_back(cast(x->params[i].scalar, expr(a)));
          } else {
            args.push_back(expr(a));
          }
        }
        break;
      }
      case ast::CallTarget::Unresolved:
        throw std::logic_error("codegen: unresolved call " + e.text);
    }
    std::string s = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i];
    return s + ")";
  }

  void whole_assign(std::ostringstream& os, const ast::Stmt& s, int indent) const {
    const Symbol* t = s.target;
    const ast::Expr& rhs = *s.value;
    std::string tn = symbol_name(t);
    switch (s.form) {
      case ast::AssignForm::Scalar:
        if (rhs.array_op == ast::ArrayOp::Dot) {
          os << lower_contraction(tn, t->type.scalar, array_of(*rhs.operands[0]), array_of(*rhs.operands[1]),
                                  indent);
        } else {
          os << pad(indent) << tn << " = " << cast(t->type.scalar, expr(rhs)) << ";\n";
        }
        return;
      case ast::AssignForm::Fill:
        os << lower_fill({tn, t->type}, expr(rhs), indent);
        return;
      case ast::AssignForm::Copy: {
        std::string idx = index_suffix(t->type);
        os << pad(indent) << "{\n"
           << element_loops(t->type, tn + idx + " = " + array_of(rhs).base + idx + ";", indent + 1)
           << pad(indent) << "}\n";
        return;
      }
      case ast::AssignForm::Elementwise:
        if (rhs.operands[0]->kind == ast::ExprKind::Name && rhs.operands[1]->kind == ast::ExprKind::Name) {
          os << lower_elementwise({tn, t->type}, array_of(*rhs.operands[0]), rhs.op, array_of(*rhs.operands[1]),
                                  indent);
        } else {
          std::string idx = index_suffix(t->type);
          os << pad(indent) << "{\n"
             << element_loops(t->type, tn + idx + " = " + element_expr(rhs, idx) + ";", indent + 1)
             << pad(indent) << "}\n";
        }
        return;
      case ast::AssignForm::Contraction:
        os << lower_contraction(tn, ScalarKind::Float32, array_of(*rhs.operands[0]), array_of(*rhs.operands[1]),
                                indent);
        return;
    }
  }

  std::string element_expr(const ast::Expr& e, const std::string& idx) const {
    if (e.kind == ast::ExprKind::Name) return array_of(e).base + idx;
    return "(" + element_expr(*e.operands[0], idx) + " " + ast::binary_op_text(e.op) + " " +
           element_expr(*e.operands[1], idx) + ")";
  }

  void stmt(std::ostringstream& os, const ast::Stmt& s, int indent) {
    switch (s.kind) {
      case ast::StmtKind::Pass:
        return;
      case ast::StmtKind::Decl:
        if (s.value) whole_assign(os, s, indent);
        return;
      case ast::StmtKind::Assign:
        whole_assign(os, s, indent);
        return;
      case ast::StmtKind::ElemAssign: {
        os << pad(indent) << symbol_name(s.target);
        for (const auto& i : s.indices) os << '[' << expr(*i) << ']';
        os << " = " << cast(s.target->type.scalar, expr(*s.value)) << ";\n";
        return;
      }
      case ast::StmtKind::For: {
        std::string hi = "mp_hi" + std::to_string(loop_depth_);
        std::string v = symbol_name(s.target);
        os << pad(indent) << "{\n";
        os << pad(indent + 1) << "int32_t " << hi << ";\n";
        os << pad(indent + 1) << v << " = " << cast(ScalarKind::Int32, expr(*s.lower)) << ";\n";
        os << pad(indent + 1) << hi << " = " << cast(ScalarKind::Int32, expr(*s.upper)) << ";\n";
        os << pad(indent + 1) << "for (; " << v << " < " << hi << "; ++" << v << ") {\n";
        ++loop_depth_;
        for (const auto& b : s.body) stmt(os, *b, indent + 2);
        --loop_depth_;
        os << pad(indent + 1) << "}\n";
        os << pad(indent) << "}\n";
        return;
      }
      case ast::StmtKind::ExprStmt:
        os << pad(indent) << expr(*s.value) << ";\n";
        return;
      case ast::StmtKind::Return:
        if (s.value)
          os << pad(indent) << "return " << cast(cur_->return_type.scalar, expr(*s.value)) << ";\n";
        else
          os << pad(indent) << "return;\n";
        return;
    }
  }

  std::string signature(const FunctionInfo& f) const {
    std::string s = "static ";
    s += f.return_type.is_void() ? "void" : scalar_c_name(f.return_type.scalar);
    s += " " + f.mangled + "(";
    if (f.params.empty()) s += "void";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      const Symbol* p = f.params[i];
      if (i) s += ", ";
      if (!p->type.is_array())
        s += std::string(scalar_c_name(p->type.scalar)) + " " + p->name;
      else if (p->type.rank() == 1)
        s += std::string(scalar_c_name(p->type.scalar)) + " *" + p->name;
      else
        s += std::string(scalar_c_name(p->type.scalar)) + " (*" + p->name + ")[" + std::to_string(p->type.dims[1]) +
             "]";
    }
    return s + ")";
  }

  void function(std::ostringstream& os, const FunctionInfo& f) {
    cur_ = &f;
    next_target_ = nullptr;
    if (f.stage_index >= 0 && static_cast<std::size_t>(f.stage_index) + 1 < prog_.stages.size())
      next_target_ = prog_.stages[f.stage_index + 1].flow;
    os << signature(f) << "\n{\n";
    bool any = false;
    for (const auto& s : f.symbols) {
      if (s->storage != Storage::Stack) continue;
      os << pad(1) << scalar_c_name(s->type.scalar) << ' ' << s->name << " = 0;\n";
      any = true;
    }
    for (const auto* p : f.params) {
      os << pad(1) << "(void)" << p->name << ";\n";
      any = true;
    }
    for (const auto& s : f.symbols) {
      if (s->storage == Storage::Stack && !s->is_read) {
        os << pad(1) << "(void)" << s->name << ";\n";
        any = true;
      }
    }
    if (any && !f.def->body.empty()) os << '\n';
    loop_depth_ = 0;
    for (const auto& s : f.def->body) stmt(os, *s, 1);
    os << "}\n";
  }

  std::string constant_definitions() const {
    std::ostringstream os;
    for (const auto& m : prog_.modules) {
      for (const auto& g : m->globals) {
        if (g->storage != Storage::Constant || !g->type.is_scalar()) continue;
        std::string n = symbol_name(g.get());
        std::visit(
            [&](auto v) {
              using V = decltype(v);
              if constexpr (std::is_same_v<V, std::int32_t>) {
                os << "enum { " << n << " = " << v << " };\n";
              } else if constexpr (std::is_same_v<V, std::int64_t>) {
                os << "#define " << n << " ((int64_t)INT64_C(" << v << "))\n";
              } else if constexpr (std::is_same_v<V, std::uint64_t>) {
                os << "#define " << n << " ((uint64_t)UINT64_C(" << v << "))\n";
              } else {
                os << "#define " << n << " (" << c_float_literal(v) << ")\n";
              }
            },
            g->const_value);
      }
    }
    return os.str();
  }

  std::string arena_definitions() const {
    std::ostringstream os;
    if (layout_.total == 0) return "";
    os << "MP_DEFINE_ARENA(" << layout_.total << ")\n\n";
    for (const auto& o : prog_.arena_objects) {
      std::size_t off = layout_.offsets.at(o.id);
      const Type& t = o.symbol->type;
      std::string elem = scalar_c_name(o.element);
      std::string ptr = t.rank() == 1 ? elem + " *" : elem + " (*)[" + std::to_string(t.dims[1]) + "]";
      os << "#define " << o.c_name << " ((" << ptr << ")(void *)(MP_ARENA_BASE + " << off << "))\n";
    }
    return os.str();
  }

 private:
  const TypedProgram& prog_;
  const ArenaLayout& layout_;
  const FunctionInfo* cur_ = nullptr;
  const FunctionInfo* next_target_ = nullptr;
  int loop_depth_ = 0;
};

std::string include_line(const std::string& inc) {
  if (!inc.empty() && (inc.front() == '<' || inc.front() == '"')) return "#include " + inc + "\n";
  return "#include \"" + inc + "\"\n";
}

}  // namespace

std::string emit_driver(const TypedProgram& program) {
  std::ostringstream os;
  os << "int main(int argc, char **argv)\n{\n";
  os << "  mp_iters iters;\n";
  os << "  unsigned long long mp_n;\n\n";
  os << "  if (mp_parse_iters(argc, argv, &iters) != 0) {\n";
  os << "    fprintf(stderr, \"usage: %s [iterations]\\n\", argv[0]);\n";
  os << "    return 2;\n";
  os << "  }\n";
  for (ModuleInfo* m : program.init_order())
    if (m->init) os << "  " << m->init->mangled << "();\n";
  if (!program.stages.empty()) {
    os << "  for (mp_n = 0; !iters.present || mp_n < iters.value; ++mp_n)\n";
    os << "    " << program.stages.front().flow->mangled << "();\n";
  } else {
    os << "  (void)mp_n;\n";
  }
  os << "  return 0;\n}\n";
  return os.str();
}

CTranslationUnit emit_translation_unit(const TypedProgram& program, const ArenaLayout& layout,
                                       const CodegenOptions& opts) {
  for (const auto& o : program.arena_objects)
    if (!layout.offsets.count(o.id))
      throw std::logic_error("codegen: arena object " + o.display_name + " has no placement");
  Emitter em(program, layout);
  std::ostringstream os;
  if (!opts.header_comment.empty()) {
    os << "/*\n";
    std::istringstream in(opts.header_comment);
    std::string line;
    while (std::getline(in, line)) os << (line.empty() ? " *" : " * " + line) << '\n';
    os << " */\n\n";
  }
  os << "#include <stdio.h>\n#include <stdlib.h>\n#include <math.h>\n#include <stdint.h>\n";
  os << "#include \"motepy_rt.h\"\n";
  for (const auto& inc : opts.extra_includes) os << include_line(inc);
  os << '\n';
  std::string arena = em.arena_definitions();
  if (!arena.empty()) os << arena << '\n';
  std::string consts = em.constant_definitions();
  if (!consts.empty()) os << consts << '\n';

  std::vector<const FunctionInfo*> fns;
  for (const auto& m : program.modules)
    for (const auto& f : m->functions)
      if (f->reachable) fns.push_back(f.get());
  for (const auto* f : fns) os << em.signature(*f) << ";\n";
  if (!fns.empty()) os << '\n';
  for (const auto* f : fns) {
    em.function(os, *f);
    os << '\n';
  }
  os << emit_driver(program);
  return {os.str()};
}

}  // namespace motepy
