// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/sema.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace motepy {

const char* storage_name(Storage s) {
  switch (s) {
    case Storage::Arena: return "arena";
    case Storage::Stack: return "stack";
    case Storage::Constant: return "constant";
    case Storage::ParameterAlias: return "parameter-alias";
    case Storage::ParameterValue: return "parameter-value";
    case Storage::External: return "external";
  }
  return "?";
}

ModuleInfo* TypedProgram::module(const std::string& name) const {
  for (const auto& m : modules)
    if (m->name == name) return m.get();
  return nullptr;
}

ExternInfo* TypedProgram::find_extern(const std::string& name) const {
  for (const auto& e : externs)
    if (e->name == name) return e.get();
  return nullptr;
}

std::vector<ModuleInfo*> TypedProgram::init_order() const {
  std::vector<ModuleInfo*> out;
  for (const auto& st : stages)
    if (std::find(out.begin(), out.end(), st.module) == out.end()) out.push_back(st.module);
  return out;
}

std::vector<ExternDecl> builtin_externs() {
  std::vector<ExternDecl> out;
  ExternDecl printf_decl;
  printf_decl.name = printf_decl.c_name = "printf";
  printf_decl.varargs = true;
  printf_decl.params = {Type::string_type()};
  printf_decl.result = Type::scalar_of(ScalarKind::Int32);
  out.push_back(printf_decl);

  ExternDecl rand_decl;
  rand_decl.name = rand_decl.c_name = "rand";
  rand_decl.result = Type::scalar_of(ScalarKind::Int32);
  out.push_back(rand_decl);

  ExternDecl exp_decl;
  exp_decl.name = "exp";
  exp_decl.c_name = "expf";
  exp_decl.params = {Type::scalar_of(ScalarKind::Float32)};
  exp_decl.result = Type::scalar_of(ScalarKind::Float32);
  out.push_back(exp_decl);

  ExternDecl rand_max;
  rand_max.name = rand_max.c_name = "RAND_MAX";
  rand_max.is_function = false;
  rand_max.result = Type::scalar_of(ScalarKind::Int32, true);
  out.push_back(rand_max);
  return out;
}

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

Type parse_sig_type(std::string t, bool allow_void, bool allow_pointer) {
  t = trim(t);
  if (allow_pointer && !t.empty() && t.back() == '*') {
    auto k = scalar_from_dsl_name(trim(t.substr(0, t.size() - 1)));
    if (!k) throw std::invalid_argument("unknown pointer element type '" + t + "'");
    return Type::array_of(*k, {});
  }
  if (t == "void" && allow_void) return Type::void_type();
  if (t == "string" || t == "const char*") return Type::string_type();
  auto k = scalar_from_dsl_name(t);
  if (!k) throw std::invalid_argument("unknown type '" + t + "' in extern signature");
  return Type::scalar_of(*k);
}

}  // namespace

ExternDecl parse_extern_signature(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0)
    throw std::invalid_argument("extern declaration must look like name:signature");
  ExternDecl d;
  d.name = d.c_name = trim(text.substr(0, colon));
  for (char c : d.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      throw std::invalid_argument("invalid extern name '" + d.name + "'");
  std::string sig = trim(text.substr(colon + 1));
  if (sig.empty()) throw std::invalid_argument("empty extern signature");
  if (sig.front() != '(') {
    d.is_function = false;
    d.result = parse_sig_type(sig, false, false);
    if (!d.result.is_scalar()) throw std::invalid_argument("extern values must be scalar");
    d.result.is_const = true;
    return d;
  }
  auto close = sig.find(')');
  auto arrow = sig.find("->", close == std::string::npos ? 0 : close);
  if (close == std::string::npos || arrow == std::string::npos)
    throw std::invalid_argument("extern function signature must look like (T, ...)->R");
  std::string params = sig.substr(1, close - 1);
  d.result = parse_sig_type(sig.substr(arrow + 2), true, false);
  std::size_t start = 0;
  if (!trim(params).empty()) {
    while (start <= params.size()) {
      auto comma = params.find(',', start);
      std::string p = trim(params.substr(start, comma == std::string::npos ? std::string::npos
                                                                           : comma - start));
      if (p == "...") {
        d.varargs = true;
        if (comma != std::string::npos)
          throw std::invalid_argument("'...' must be the last extern parameter");
      } else {
        d.params.push_back(parse_sig_type(p, false, true));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return d;
}

MulShape shape_of_mul(std::span<const std::int64_t> lhs, std::span<const std::int64_t> rhs) {
  MulShape r;
  auto mismatch = [&](std::int64_t a, std::int64_t b) {
    r.error = "inner dimensions do not match (" + std::to_string(a) + " vs " + std::to_string(b) + ")";
    return r;
  };
  if (lhs.size() == 1 && rhs.size() == 1) {
    if (lhs[0] != rhs[0]) return mismatch(lhs[0], rhs[0]);
    r.ok = true;
    r.op = ast::ArrayOp::Dot;
    return r;
  }
  if (lhs.size() == 1 && rhs.size() == 2) {
    if (lhs[0] != rhs[0]) return mismatch(lhs[0], rhs[0]);
    r.ok = true;
    r.op = ast::ArrayOp::VecMat;
    r.dims = {rhs[1]};
    return r;
  }
  if (lhs.size() == 2 && rhs.size() == 1) {
    if (lhs[1] != rhs[0]) return mismatch(lhs[1], rhs[0]);
    r.ok = true;
    r.op = ast::ArrayOp::MatVec;
    r.dims = {lhs[0]};
    return r;
  }
  if (lhs.size() == 2 && rhs.size() == 2) {
    r.error = "matrix-matrix products are not supported";
    return r;
  }
  r.error = "unsupported operand ranks for '*'";
  return r;
}

Type resolve_type(const ast::TypeExpr& t, const ModuleInfo& module, DiagnosticEngine& diags) {
  auto k = scalar_from_dsl_name(t.base);
  if (!k) {
    diags.error(t.span, t.base == "void" ? "'void' is not a variable type"
                                         : "unknown type '" + t.base + "'");
    return Type::scalar_of(ScalarKind::Int32);
  }
  if (t.dims.empty()) return Type::scalar_of(*k, t.is_const);
  std::vector<std::int64_t> dims;
  for (const auto& d : t.dims) {
    std::int64_t v = d.value;
    if (!d.name.empty()) {
      auto it = module.global_by_name.find(d.name);
      if (it == module.global_by_name.end() || it->second->storage != Storage::Constant ||
          !it->second->type.is_integer()) {
        diags.error(d.span, "array extent '" + d.name + "' must name a const integer global");
        v = 1;
      } else {
        v = std::visit([](auto x) { return static_cast<std::int64_t>(x); }, it->second->const_value);
      }
    }
    if (v <= 0) {
      diags.error(d.span, "array extent must be positive");
      v = 1;
    }
    dims.push_back(v);
  }
  if (t.is_const) diags.error(t.span, "const arrays are not supported");
  return Type::array_of(*k, std::move(dims));
}

namespace {

constexpr std::array kReservedWords = {
    "auto",     "break",    "case",     "char",     "continue", "default",  "do",
    "double",   "else",     "enum",     "extern",   "goto",     "if",       "inline",
    "int",      "long",     "register", "restrict", "short",    "signed",   "sizeof",
    "static",   "struct",   "switch",   "typedef",  "union",    "unsigned", "volatile",
    "while",    "_Bool",    "_Complex", "float",    "int32_t",  "int64_t",  "uint64_t",
    "void",     "range",    "next",     "main",     "const",    "return",   "for"};

bool reserved_identifier(const std::string& name) {
  for (const char* w : kReservedWords)
    if (name == w) return true;
  if (name.find("__") != std::string::npos) return true;
  if (name.rfind("mp_", 0) == 0 || name.rfind("MP_", 0) == 0) return true;
  return false;
}

void collect_decl_names(const std::vector<ast::StmtPtr>& body, std::unordered_set<std::string>& out) {
  for (const auto& s : body) {
    if (s->kind == ast::StmtKind::Decl) out.insert(s->name);
    if (s->kind == ast::StmtKind::For) collect_decl_names(s->body, out);
  }
}

class Resolver {
 public:
  Resolver(TypedProgram& p, DiagnosticEngine& d) : prog_(p), diags_(d) {}

  void add_externs(std::span<const ExternDecl> decls) {
    for (const auto& d : decls) {
      if (ExternInfo* existing = prog_.find_extern(d.name)) {
        *existing = make_extern(d);
        continue;
      }
      prog_.externs.push_back(std::make_unique<ExternInfo>(make_extern(d)));
    }
  }

  void run(const ast::PipelineSpec& spec, std::vector<ast::Module> modules) {
    prog_.pipeline_file = spec.file;
    // Modules in first-appearance order within the pipeline.
    for (const auto& st : spec.stages) {
      if (prog_.module(st.module)) continue;
      auto it = std::find_if(modules.begin(), modules.end(),
                             [&](const ast::Module& m) { return m.name == st.module; });
      if (it == modules.end()) {
        diags_.error(st.span, "cannot find module '" + st.module + "' (expected " + st.module + ".py)");
        continue;
      }
      auto info = std::make_unique<ModuleInfo>();
      info->name = it->name;
      info->ast = std::move(*it);
      modules.erase(it);
      prog_.modules.push_back(std::move(info));
    }
    for (auto& m : prog_.modules) {
      if (reserved_identifier(m->name))
        diags_.error(SourceSpan{m->ast.file, 1, 1, 0}, "module name '" + m->name + "' is reserved");
      declare_globals(*m);
      declare_functions(*m);
    }
    for (const auto& st : spec.stages) {
      ModuleInfo* m = prog_.module(st.module);
      if (!m) continue;
      auto fit = m->function_by_name.find(st.function);
      if (fit == m->function_by_name.end()) {
        diags_.error(st.span, "module '" + st.module + "' has no function '" + st.function + "'");
        continue;
      }
      FunctionInfo* f = fit->second;
      if (!f->is_flow)
        diags_.error(st.span, "pipeline stage " + st.module + "." + st.function +
                                  " is not decorated with @flow");
      if (f->is_init) diags_.error(st.span, "init cannot be a pipeline stage");
      if (f->stage_index >= 0) diags_.error(st.span, "function used by more than one stage");
      f->stage_index = static_cast<int>(prog_.stages.size());
      prog_.stages.push_back({m, f, st.span});
    }
    for (auto& m : prog_.modules)
      for (auto& f : m->functions) resolve_function(*m, *f);
    check_recursion();
    compute_reachability();
  }

 private:
  static ExternInfo make_extern(const ExternDecl& d) {
    ExternInfo e;
    e.name = d.name;
    e.c_name = d.c_name.empty() ? d.name : d.c_name;
    e.is_function = d.is_function;
    e.varargs = d.varargs;
    e.params = d.params;
    e.result = d.result;
    e.known = true;
    e.has_value = d.has_value;
    e.value = d.value;
    return e;
  }

  void check_name(const std::string& name, SourceSpan span) {
    if (reserved_identifier(name)) diags_.error(span, "'" + name + "' is a reserved identifier");
  }

  void declare_globals(ModuleInfo& m) {
    // Constants first so extents may refer to constants declared later.
    for (int pass = 0; pass < 2; ++pass) {
      for (auto& g : m.ast.globals) {
        bool is_const = g.type.is_const;
        if ((pass == 0) != is_const) continue;
        check_name(g.name, g.span);
        if (m.global_by_name.count(g.name)) {
          diags_.error(g.span, "duplicate global '" + g.name + "' in module '" + m.name + "'");
          continue;
        }
        auto sym = std::make_unique<Symbol>();
        sym->name = g.name;
        sym->module = m.name;
        sym->span = g.span;
        sym->type = resolve_type(g.type, m, diags_);
        if (is_const) {
          sym->storage = Storage::Constant;
          if (!sym->type.is_scalar()) {
            // resolve_type already reported const arrays.
          } else if (!g.init) {
            diags_.error(g.span, "constant '" + g.name + "' needs an initializer");
          } else if (g.init->kind == ast::ExprKind::IntLit) {
            sym->const_value = convert(ScalarValue{g.init->int_value}, sym->type.scalar);
            sym->const_init = g.init.get();
          } else if (g.init->kind == ast::ExprKind::FloatLit) {
            float f = std::strtof(g.init->text.c_str(), nullptr);
            sym->const_value = convert(ScalarValue{f}, sym->type.scalar);
            sym->const_init = g.init.get();
          } else {
            diags_.error(g.init->span, "constant initializer must be a numeric literal");
          }
        } else if (sym->type.is_scalar()) {
          diags_.error(g.span, "global scalar '" + g.name +
                                   "' must be const; mutable state belongs in arrays");
        } else {
          sym->storage = Storage::Arena;
          if (g.init) diags_.error(g.init->span, "global arrays cannot have initializers; assign them in init()");
        }
        m.global_by_name[g.name] = sym.get();
        m.globals.push_back(std::move(sym));
      }
    }
  }

  void declare_functions(ModuleInfo& m) {
    for (auto& fd : m.ast.functions) {
      check_name(fd.name, fd.span);
      if (m.function_by_name.count(fd.name) || m.global_by_name.count(fd.name)) {
        diags_.error(fd.span, "duplicate definition of '" + fd.name + "' in module '" + m.name + "'");
        continue;
      }
      auto f = std::make_unique<FunctionInfo>();
      f->module = m.name;
      f->name = fd.name;
      f->mangled = m.name + "__" + fd.name;
      f->def = &fd;
      f->is_flow = fd.has_decorator("flow");
      f->is_init = fd.name == "init";
      if (fd.return_type.base == "void" && fd.return_type.dims.empty() && !fd.return_type.is_const) {
        f->return_type = Type::void_type();
      } else {
        f->return_type = resolve_type(fd.return_type, m, diags_);
        if (f->return_type.is_array())
          diags_.error(fd.return_type.span, "functions cannot return arrays");
        f->return_type.is_const = false;
      }
      if ((f->is_flow || f->is_init) && !f->return_type.is_void())
        diags_.error(fd.return_type.span, std::string(f->is_flow ? "flow" : "init") +
                                              " functions must return void");
      if (f->is_init && !fd.params.empty()) diags_.error(fd.span, "init() takes no parameters");
      if (f->is_init && f->is_flow) diags_.error(fd.span, "init() cannot be a flow function");
      for (std::size_t i = 0; i < fd.params.size(); ++i) {
        const auto& p = fd.params[i];
        check_name(p.name, p.span);
        if (m.global_by_name.count(p.name))
          diags_.error(p.span, "parameter '" + p.name + "' shadows a global");
        for (auto* prev : f->params)
          if (prev->name == p.name) diags_.error(p.span, "duplicate parameter '" + p.name + "'");
        auto sym = std::make_unique<Symbol>();
        sym->name = p.name;
        sym->module = m.name;
        sym->function = fd.name;
        sym->span = p.span;
        sym->type = resolve_type(p.type, m, diags_);
        sym->storage = sym->type.is_array() ? Storage::ParameterAlias : Storage::ParameterValue;
        sym->param_index = static_cast<int>(i);
        if (p.type.is_const) diags_.error(p.span, "parameters cannot be const");
        f->params.push_back(sym.get());
        f->symbols.push_back(std::move(sym));
      }
      f->may_alias.resize(f->params.size());
      m.function_by_name[fd.name] = f.get();
      m.functions.push_back(std::move(f));
    }
    auto init = m.function_by_name.find("init");
    if (init == m.function_by_name.end()) {
      diags_.error(SourceSpan{m.ast.file, 1, 1, 0}, "module '" + m.name + "' does not define init() -> void");
    } else {
      m.init = init->second;
    }
  }

  struct Scope {
    std::unordered_map<std::string, Symbol*> names;
    std::unordered_set<std::string> declared_somewhere;
    std::vector<Symbol*> active_loops;
    int next_count = 0;
  };

  Symbol* lookup(const std::string& name, ModuleInfo& m, Scope& scope) {
    if (auto it = scope.names.find(name); it != scope.names.end()) return it->second;
    if (auto it = m.global_by_name.find(name); it != m.global_by_name.end()) return it->second;
    return nullptr;
  }

  void resolve_function(ModuleInfo& m, FunctionInfo& f) {
    Scope scope;
    for (auto* p : f.params) scope.names[p->name] = p;
    collect_decl_names(f.def->body, scope.declared_somewhere);
    for (const auto& s : f.def->body) resolve_stmt(m, f, scope, *s);
    if (f.next_stmt == nullptr && scope.next_count == 0) return;
  }

  void resolve_stmt(ModuleInfo& m, FunctionInfo& f, Scope& scope, ast::Stmt& s) {
    switch (s.kind) {
      case ast::StmtKind::Pass:
        return;
      case ast::StmtKind::Return:
        if (s.value) resolve_expr(m, f, scope, *s.value, false);
        return;
      case ast::StmtKind::Decl: {
        if (s.value) resolve_expr(m, f, scope, *s.value, false);
        check_name(s.name, s.name_span);
        if (scope.names.count(s.name)) {
          diags_.error(s.name_span, "redeclaration of '" + s.name + "'");
          return;
        }
        if (m.global_by_name.count(s.name) || m.function_by_name.count(s.name)) {
          diags_.error(s.name_span, "local '" + s.name + "' shadows a module-level name");
          return;
        }
        auto sym = std::make_unique<Symbol>();
        sym->name = s.name;
        sym->module = m.name;
        sym->function = f.name;
        sym->span = s.name_span;
        sym->type = resolve_type(s.decl_type, m, diags_);
        if (s.decl_type.is_const) diags_.error(s.decl_type.span, "local constants are not supported");
        sym->type.is_const = false;
        sym->storage = sym->type.is_array() ? Storage::Arena : Storage::Stack;
        s.target = sym.get();
        scope.names[s.name] = sym.get();
        f.symbols.push_back(std::move(sym));
        return;
      }
      case ast::StmtKind::Assign:
      case ast::StmtKind::ElemAssign: {
        for (auto& i : s.indices) resolve_expr(m, f, scope, *i, false);
        resolve_expr(m, f, scope, *s.value, false);
        Symbol* t = lookup(s.name, m, scope);
        if (!t) {
          diags_.error(s.name_span, scope.declared_somewhere.count(s.name)
                                        ? "'" + s.name + "' assigned before its declaration"
                                        : "assignment to undeclared name '" + s.name + "'");
          return;
        }
        s.target = t;
        return;
      }
      case ast::StmtKind::For: {
        resolve_expr(m, f, scope, *s.lower, false);
        resolve_expr(m, f, scope, *s.upper, false);
        Symbol* var = lookup(s.name, m, scope);
        if (!var) {
          check_name(s.name, s.name_span);
          if (scope.declared_somewhere.count(s.name))
            diags_.error(s.name_span, "loop variable '" + s.name + "' is declared later in the function");
          auto sym = std::make_unique<Symbol>();
          sym->name = s.name;
          sym->module = m.name;
          sym->function = f.name;
          sym->span = s.name_span;
          sym->type = Type::scalar_of(ScalarKind::Int32);
          sym->storage = Storage::Stack;
          var = sym.get();
          scope.names[s.name] = var;
          f.symbols.push_back(std::move(sym));
        } else if (var->storage != Storage::Stack || !var->type.is_scalar() ||
                   var->type.scalar != ScalarKind::Int32) {
          diags_.error(s.name_span, "loop variable '" + s.name + "' must be a local int32_t");
        }
        if (std::find(scope.active_loops.begin(), scope.active_loops.end(), var) !=
            scope.active_loops.end())
          diags_.error(s.name_span, "loop variable '" + s.name + "' is already used by an enclosing loop");
        var->is_loop_var = true;
        var->is_read = true;
        s.target = var;
        scope.active_loops.push_back(var);
        for (auto& b : s.body) resolve_stmt(m, f, scope, *b);
        scope.active_loops.pop_back();
        return;
      }
      case ast::StmtKind::ExprStmt: {
        resolve_expr(m, f, scope, *s.value, true);
        if (s.value->kind == ast::ExprKind::Call && s.value->call_target == ast::CallTarget::Next) {
          if (!f.is_flow) {
            diags_.error(s.value->span, "next() may only be called from a flow function");
          } else if (++scope.next_count > 1) {
            diags_.error(s.value->span, "a flow function may call next() at most once");
          } else {
            f.next_stmt = &s;
          }
        }
        return;
      }
    }
  }

  ExternInfo* lookup_extern(const std::string& name, bool as_call, SourceSpan span) {
    ExternInfo* e = prog_.find_extern(name);
    if (!e) {
      auto info = std::make_unique<ExternInfo>();
      info->name = info->c_name = name;
      info->is_function = as_call;
      info->varargs = as_call;
      info->result = Type::scalar_of(ScalarKind::Int32, !as_call);
      e = info.get();
      prog_.externs.push_back(std::move(info));
      diags_.warning(span, "unresolved name '" + name + "' passed through to C as an external " +
                               (as_call ? "function returning int32_t" : "int32_t value"));
    }
    if (e->is_function != as_call) {
      diags_.error(span, as_call ? "'" + name + "' is not a function"
                                 : "function '" + name + "' used as a value");
    }
    return e;
  }

  void resolve_expr(ModuleInfo& m, FunctionInfo& f, Scope& scope, ast::Expr& e, bool stmt_level) {
    switch (e.kind) {
      case ast::ExprKind::IntLit:
      case ast::ExprKind::FloatLit:
      case ast::ExprKind::StrLit:
        return;
      case ast::ExprKind::Name: {
        if (Symbol* s = lookup(e.text, m, scope)) {
          e.symbol = s;
          return;
        }
        if (scope.declared_somewhere.count(e.text)) {
          diags_.error(e.span, "'" + e.text + "' used before its declaration");
          return;
        }
        if (m.function_by_name.count(e.text)) {
          diags_.error(e.span, "function '" + e.text + "' used as a value");
          return;
        }
        e.external = lookup_extern(e.text, false, e.span);
        return;
      }
      case ast::ExprKind::Index: {
        auto& base = *e.operands[0];
        Symbol* s = lookup(base.text, m, scope);
        if (!s) {
          diags_.error(base.span, scope.declared_somewhere.count(base.text)
                                      ? "'" + base.text + "' used before its declaration"
                                      : "unknown array '" + base.text + "'");
        }
        base.symbol = s;
        e.symbol = s;
        for (std::size_t i = 1; i < e.operands.size(); ++i)
          resolve_expr(m, f, scope, *e.operands[i], false);
        return;
      }
      case ast::ExprKind::Binary:
      case ast::ExprKind::Cast:
        for (auto& o : e.operands) resolve_expr(m, f, scope, *o, false);
        return;
      case ast::ExprKind::Call: {
        for (auto& o : e.operands) resolve_expr(m, f, scope, *o, false);
        if (e.text == "next") {
          e.call_target = ast::CallTarget::Next;
          if (!stmt_level) diags_.error(e.span, "next() must be used as a statement");
          return;
        }
        if (e.text == "range") {
          diags_.error(e.span, "range() is only valid in a for statement");
          return;
        }
        if (lookup(e.text, m, scope)) {
          diags_.error(e.span, "'" + e.text + "' is not a function");
          return;
        }
        if (auto it = m.function_by_name.find(e.text); it != m.function_by_name.end()) {
          FunctionInfo* callee = it->second;
          if (callee->is_init || callee->is_flow) {
            diags_.error(e.span, std::string(callee->is_init ? "init()" : "flow functions") +
                                     " cannot be called directly");
          }
          e.call_target = ast::CallTarget::Function;
          e.callee = callee;
          if (std::find(f.callees.begin(), f.callees.end(), callee) == f.callees.end())
            f.callees.push_back(callee);
          return;
        }
        e.call_target = ast::CallTarget::Extern;
        e.external = lookup_extern(e.text, true, e.span);
        return;
      }
    }
  }

  void check_recursion() {
    enum class Mark { None, Active, Done };
    std::unordered_map<const FunctionInfo*, Mark> marks;
    std::function<bool(FunctionInfo*)> visit = [&](FunctionInfo* f) -> bool {
      Mark& mk = marks[f];
      if (mk == Mark::Done) return false;
      if (mk == Mark::Active) {
        diags_.error(f->def->span, "recursive call cycle through '" + f->module + "." + f->name +
                                       "'; static arena allocation needs non-reentrant functions");
        return true;
      }
      mk = Mark::Active;
      for (auto* c : f->callees)
        if (visit(c)) {
          marks[f] = Mark::Done;
          return true;
        }
      marks[f] = Mark::Done;
      return false;
    };
    for (auto& m : prog_.modules)
      for (auto& f : m->functions) visit(f.get());
  }

  void compute_reachability() {
    std::function<void(FunctionInfo*)> mark = [&](FunctionInfo* f) {
      if (f->reachable) return;
      f->reachable = true;
      for (auto* c : f->callees) mark(c);
    };
    for (auto* m : prog_.init_order())
      if (m->init) mark(m->init);
    for (std::size_t k = 0; k < prog_.stages.size(); ++k) {
      FunctionInfo* flow = prog_.stages[k].flow;
      if (k == 0 || (prog_.stages[k - 1].flow->reachable && prog_.stages[k - 1].flow->next_stmt)) {
        mark(flow);
      } else {
        diags_.warning(prog_.stages[k].span,
                       "stage " + flow->mangled + " never runs because the previous stage does not call next()");
      }
    }
    for (auto& m : prog_.modules)
      for (auto& f : m->functions)
        if (!f->reachable && f->stage_index < 0)
          diags_.warning(f->def->span, "function '" + f->module + "." + f->name + "' is never called");
  }

  TypedProgram& prog_;
  DiagnosticEngine& diags_;
};

// ---------------------------------------------------------------------------

class Checker {
 public:
  Checker(TypedProgram& p, DiagnosticEngine& d) : prog_(p), diags_(d) {}

  void run() {
    for (auto& m : prog_.modules)
      for (auto& f : m->functions) check_function(*f);
    check_wiring();
    compute_aliases();
    check_contraction_aliasing();
    collect_arena_objects();
    warn_dead_scalars();
  }

 private:
  static bool is_scalar(const Type& t) { return t.is_scalar(); }

  static ast::Expr* top_name(ast::Expr& e) { return e.kind == ast::ExprKind::Name ? &e : nullptr; }

  void require_scalar(const ast::Expr& e, const Type& t, const char* what) {
    if (t.is_scalar()) return;
    if (t.is_array())
      diags_.error(e.span, std::string(what) + " must be a scalar, not an array");
    else if (t.is_void())
      diags_.error(e.span, std::string(what) + " has no value (void)");
    else
      diags_.error(e.span, std::string(what) + " must be numeric");
  }

  // Checks an expression. `top` marks the whole right-hand side of an
  // assignment, the only place contractions are allowed.
  Type check_expr(ast::Expr& e, bool top) {
    Type t = compute(e, top);
    e.type = t;
    return t;
  }

  Type compute(ast::Expr& e, bool top) {
    switch (e.kind) {
      case ast::ExprKind::IntLit:
        return Type::scalar_of(e.int_value >= std::numeric_limits<std::int32_t>::min() &&
                                       e.int_value <= std::numeric_limits<std::int32_t>::max()
                                   ? ScalarKind::Int32
                                   : ScalarKind::Int64);
      case ast::ExprKind::FloatLit:
        return Type::scalar_of(ScalarKind::Float32);
      case ast::ExprKind::StrLit:
        return Type::string_type();
      case ast::ExprKind::Name: {
        if (e.symbol) {
          if (e.symbol->storage == Storage::Stack) e.symbol->is_read = true;
          return e.symbol->type;
        }
        if (e.external) return e.external->result;
        return Type::scalar_of(ScalarKind::Int32);
      }
      case ast::ExprKind::Index: {
        Symbol* s = e.symbol;
        for (std::size_t i = 1; i < e.operands.size(); ++i) {
          Type it = check_expr(*e.operands[i], false);
          if (!it.is_integer()) diags_.error(e.operands[i]->span, "array index must be an integer");
        }
        if (!s) return Type::scalar_of(ScalarKind::Float32);
        e.operands[0]->type = s->type;
        if (!s->type.is_array()) {
          diags_.error(e.span, "'" + s->name + "' is not an array");
          return Type::scalar_of(ScalarKind::Float32);
        }
        if (e.operands.size() - 1 != s->type.rank())
          diags_.error(e.span, "'" + s->name + "' has rank " + std::to_string(s->type.rank()) +
                                   " but is indexed with " + std::to_string(e.operands.size() - 1) +
                                   " subscript(s)");
        return Type::scalar_of(s->type.scalar);
      }
      case ast::ExprKind::Binary:
        return check_binary(e, top);
      case ast::ExprKind::Cast: {
        auto target = *scalar_from_dsl_name(e.text);
        ast::Expr& arg = *e.operands[0];
        Type at = check_expr(arg, false);
        if (at.is_array()) {
          if (target != ScalarKind::UInt64 || arg.kind != ast::ExprKind::Name)
            diags_.error(e.span, "only uint64_t(array) is allowed on arrays (yields its address)");
        } else {
          require_scalar(arg, at, "cast operand");
        }
        return Type::scalar_of(target);
      }
      case ast::ExprKind::Call:
        return check_call(e);
    }
    return {};
  }

  Type check_binary(ast::Expr& e, bool top) {
    ast::Expr& lhs = *e.operands[0];
    ast::Expr& rhs = *e.operands[1];
    Type lt = check_expr(lhs, false);
    Type rt = check_expr(rhs, false);
    if (lt.is_array() || rt.is_array()) {
      if (!lt.is_array() || !rt.is_array()) {
        diags_.error(e.span, "mixing arrays and scalars in '" + std::string(ast::binary_op_text(e.op)) +
                                 "' is not supported (only whole-array fill from a scalar)");
        return lt.is_array() ? lt : rt;
      }
      if (e.op == ast::BinaryOp::Div) {
        diags_.error(e.span, "'/' is not defined on arrays");
        return lt;
      }
      if (e.op == ast::BinaryOp::Mul) {
        if (!top)
          diags_.error(e.span, "matrix/vector products must be the entire right-hand side of an assignment");
        if (lhs.kind != ast::ExprKind::Name || rhs.kind != ast::ExprKind::Name)
          diags_.error(e.span, "operands of a matrix/vector product must be array names");
        if (lt.scalar != ScalarKind::Float32 || rt.scalar != ScalarKind::Float32)
          diags_.error(e.span, "'*' on arrays requires float elements");
        MulShape ms = shape_of_mul(lt.dims, rt.dims);
        if (!ms.ok) {
          diags_.error(e.span, "shape error in '*': " + ms.error + " for " + to_string(lt) + " * " +
                                   to_string(rt));
          return Type::scalar_of(ScalarKind::Float32);
        }
        e.array_op = ms.op;
        if (ms.op == ast::ArrayOp::Dot) return Type::scalar_of(ScalarKind::Float32);
        return Type::array_of(ScalarKind::Float32, ms.dims);
      }
      if (!lt.same_shape_and_kind(rt))
        diags_.error(e.span, "shape mismatch in elementwise '" + std::string(ast::binary_op_text(e.op)) +
                                 "': " + to_string(lt) + " vs " + to_string(rt));
      for (ast::Expr* o : {&lhs, &rhs}) {
        if (o->kind != ast::ExprKind::Name && !(o->kind == ast::ExprKind::Binary && o->type.is_array()))
          diags_.error(o->span, "unsupported array operand");
      }
      Type out = lt;
      out.is_const = false;
      return out;
    }
    require_scalar(lhs, lt, "left operand");
    require_scalar(rhs, rt, "right operand");
    if (!lt.is_scalar() || !rt.is_scalar()) return Type::scalar_of(ScalarKind::Int32);
    return Type::scalar_of(promote(lt.scalar, rt.scalar));
  }

  void check_array_arg(ast::Expr& arg, const Type& at, const Type& expected, const std::string& what) {
    if (arg.kind != ast::ExprKind::Name || !at.is_array()) {
      diags_.error(arg.span, what + " expects an array variable");
      return;
    }
    if (expected.dims.empty()) {
      if (at.scalar != expected.scalar)
        diags_.error(arg.span, what + " expects a " + scalar_dsl_name(expected.scalar) + " array");
      return;
    }
    if (!at.same_shape_and_kind(expected))
      diags_.error(arg.span, what + " expects " + to_string(expected) + ", got " + to_string(at));
  }

  Type check_call(ast::Expr& e) {
    std::vector<Type> arg_types;
    for (auto& o : e.operands) arg_types.push_back(check_expr(*o, false));
    switch (e.call_target) {
      case ast::CallTarget::Unresolved:
        return Type::scalar_of(ScalarKind::Int32);
      case ast::CallTarget::Next:
        return Type::void_type();
      case ast::CallTarget::Function: {
        FunctionInfo* f = e.callee;
        if (e.operands.size() != f->params.size()) {
          diags_.error(e.span, "'" + f->name + "' expects " + std::to_string(f->params.size()) +
                                   " argument(s), got " + std::to_string(e.operands.size()));
          return f->return_type;
        }
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          const Type& pt = f->params[i]->type;
          std::string what = "argument " + std::to_string(i + 1) + " of '" + f->name + "'";
          if (pt.is_array())
            check_array_arg(*e.operands[i], arg_types[i], pt, what);
          else
            require_scalar(*e.operands[i], arg_types[i], what.c_str());
        }
        return f->return_type;
      }
      case ast::CallTarget::Extern: {
        ExternInfo* x = e.external;
        if (!x) return Type::scalar_of(ScalarKind::Int32);
        if (e.operands.size() < x->params.size() ||
            (!x->varargs && e.operands.size() != x->params.size())) {
          diags_.error(e.span, "'" + x->name + "' expects " + std::to_string(x->params.size()) +
                                   (x->varargs ? " or more" : "") + " argument(s), got " +
                                   std::to_string(e.operands.size()));
          return x->result;
        }
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          std::string what = "argument " + std::to_string(i + 1) + " of '" + x->name + "'";
          const Type& at = arg_types[i];
          if (i < x->params.size()) {
            const Type& pt = x->params[i];
            if (pt.is_array()) {
              check_array_arg(*e.operands[i], at, pt, what);
            } else if (pt.is_string()) {
              if (!at.is_string()) diags_.error(e.operands[i]->span, what + " must be a string literal");
            } else {
              require_scalar(*e.operands[i], at, what.c_str());
            }
            continue;
          }
          if (at.is_array() && e.operands[i]->kind != ast::ExprKind::Name)
            diags_.error(e.operands[i]->span, what + ": only array variables can be passed to C");
          if (at.is_void()) diags_.error(e.operands[i]->span, what + " has no value (void)");
        }
        return x->result;
      }
    }
    return {};
  }

  void check_whole_assign(ast::Stmt& s, Symbol* t, ast::Expr& rhs) {
    Type rt = check_expr(rhs, true);
    if (t->type.is_scalar()) {
      s.form = ast::AssignForm::Scalar;
      if (rhs.array_op == ast::ArrayOp::Dot) return;
      require_scalar(rhs, rt, "right-hand side");
      return;
    }
    if (rhs.array_op == ast::ArrayOp::Dot) {
      diags_.error(rhs.span, "a dot product yields a scalar and cannot be assigned to an array");
      return;
    }
    if (rt.is_scalar()) {
      s.form = ast::AssignForm::Fill;
      return;
    }
    if (!rt.is_array()) {
      require_scalar(rhs, rt, "right-hand side");
      return;
    }
    if (rhs.kind == ast::ExprKind::Name) {
      s.form = ast::AssignForm::Copy;
    } else if (rhs.array_op == ast::ArrayOp::VecMat || rhs.array_op == ast::ArrayOp::MatVec) {
      s.form = ast::AssignForm::Contraction;
      if (t->type.scalar != ScalarKind::Float32)
        diags_.error(s.name_span, "target of a matrix/vector product must be a float array");
      for (auto& o : rhs.operands)
        if (o->symbol == t)
          diags_.error(rhs.span, "target '" + t->name + "' is also an operand of the product");
      if (t->type.dims != rt.dims)
        diags_.error(rhs.span, "shape mismatch: assigning " + to_string(rt) + " to '" + t->name +
                                   "' of type " + to_string(t->type));
      return;
    } else {
      s.form = ast::AssignForm::Elementwise;
    }
    if (!t->type.same_shape_and_kind(rt))
      diags_.error(rhs.span, "shape mismatch: assigning " + to_string(rt) + " to '" + t->name +
                                 "' of type " + to_string(t->type));
  }

  void check_function(FunctionInfo& f) {
    cur_ = &f;
    const auto& body = f.def->body;
    for (std::size_t i = 0; i < body.size(); ++i) check_stmt(*body[i], i + 1 == body.size(), true);
    if (!f.return_type.is_void()) {
      if (body.empty() || body.back()->kind != ast::StmtKind::Return || !body.back()->value)
        diags_.error(f.def->span, "function '" + f.name + "' must end with 'return <value>'");
    }
  }

  void check_stmt(ast::Stmt& s, bool last, bool top_level) {
    switch (s.kind) {
      case ast::StmtKind::Pass:
        return;
      case ast::StmtKind::Return: {
        if (!last || !top_level)
          diags_.error(s.span, "return must be the last statement of the function body");
        if (s.value) {
          Type vt = check_expr(*s.value, false);
          if (cur_->return_type.is_void()) {
            diags_.error(s.value->span, "function '" + cur_->name + "' returns void");
          } else {
            require_scalar(*s.value, vt, "return value");
          }
        } else if (!cur_->return_type.is_void()) {
          diags_.error(s.span, "missing return value");
        }
        return;
      }
      case ast::StmtKind::Decl:
        if (s.value && s.target) check_whole_assign(s, s.target, *s.value);
        return;
      case ast::StmtKind::Assign: {
        Symbol* t = s.target;
        if (!t) {
          check_expr(*s.value, true);
          return;
        }
        switch (t->storage) {
          case Storage::Constant:
            diags_.error(s.name_span, "assignment to constant '" + t->name + "'");
            break;
          case Storage::ParameterAlias:
            diags_.error(s.name_span, "whole-assignment to array parameter '" + t->name +
                                          "' (element writes are allowed)");
            break;
          default:
            break;
        }
        if (t->is_loop_var) diags_.error(s.name_span, "cannot assign to loop variable '" + t->name + "'");
        check_whole_assign(s, t, *s.value);
        return;
      }
      case ast::StmtKind::ElemAssign: {
        Symbol* t = s.target;
        for (auto& i : s.indices) {
          Type it = check_expr(*i, false);
          if (!it.is_integer()) diags_.error(i->span, "array index must be an integer");
        }
        Type vt = check_expr(*s.value, false);
        require_scalar(*s.value, vt, "assigned value");
        if (!t) return;
        if (!t->type.is_array()) {
          diags_.error(s.name_span, "'" + t->name + "' is not an array");
          return;
        }
        if (s.indices.size() != t->type.rank())
          diags_.error(s.name_span, "'" + t->name + "' has rank " + std::to_string(t->type.rank()) +
                                        " but is indexed with " + std::to_string(s.indices.size()) +
                                        " subscript(s)");
        return;
      }
      case ast::StmtKind::For: {
        Type lt = check_expr(*s.lower, false);
        Type ut = check_expr(*s.upper, false);
        if (!lt.is_integer()) diags_.error(s.lower->span, "range bounds must be integers");
        if (!ut.is_integer()) diags_.error(s.upper->span, "range bounds must be integers");
        for (auto& b : s.body) check_stmt(*b, false, false);
        return;
      }
      case ast::StmtKind::ExprStmt: {
        ast::Expr& e = *s.value;
        if (e.kind != ast::ExprKind::Call) {
          check_expr(e, false);
          diags_.error(e.span, "expression statement has no effect; only calls may stand alone");
          return;
        }
        check_expr(e, false);
        return;
      }
    }
  }

  void check_wiring() {
    const auto& stages = prog_.stages;
    for (std::size_t k = 0; k < stages.size(); ++k) {
      FunctionInfo* flow = stages[k].flow;
      const ast::Stmt* next = flow->next_stmt;
      if (k + 1 == stages.size()) {
        if (next) diags_.error(next->span, "the last pipeline stage cannot call next()");
        continue;
      }
      FunctionInfo* down = stages[k + 1].flow;
      if (!next) {
        if (!down->params.empty())
          diags_.error(stages[k + 1].span, "stage " + down->module + "." + down->name + " takes parameters but " +
                                               flow->module + "." + flow->name + " never calls next()");
        continue;
      }
      const auto& args = next->value->operands;
      if (args.size() != down->params.size()) {
        diags_.error(next->value->span, "next() passes " + std::to_string(args.size()) +
                                            " argument(s) but " + down->module + "." + down->name + " takes " +
                                            std::to_string(down->params.size()));
        continue;
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        const Type& pt = down->params[i]->type;
        const Type& at = args[i]->type;
        std::string what = "argument " + std::to_string(i + 1) + " of next()";
        if (pt.is_array()) {
          check_array_arg(*args[i], at, pt, what);
        } else if (!at.is_scalar() || at.scalar != pt.scalar) {
          diags_.error(args[i]->span, what + " must have type " + to_string(pt) + " to match " +
                                          down->mangled + ", got " + to_string(at));
        }
      }
    }
  }

  // Arena symbols an array-valued name may denote.
  std::set<const Symbol*> roots(const Symbol* s, const FunctionInfo& f) const {
    if (!s) return {};
    if (s->storage == Storage::Arena) return {s};
    if (s->storage == Storage::ParameterAlias && s->param_index >= 0 &&
        static_cast<std::size_t>(s->param_index) < f.may_alias.size())
      return f.may_alias[s->param_index];
    return {};
  }

  template <typename Fn>
  static void for_each_call(const std::vector<ast::StmtPtr>& body, Fn&& fn) {
    std::function<void(const ast::Expr&)> walk = [&](const ast::Expr& e) {
      if (e.kind == ast::ExprKind::Call) fn(e);
      for (const auto& o : e.operands) walk(*o);
    };
    for (const auto& s : body) {
      if (s->value) walk(*s->value);
      for (const auto& i : s->indices) walk(*i);
      if (s->lower) walk(*s->lower);
      if (s->upper) walk(*s->upper);
      for_each_call(s->body, fn);
    }
  }

  void compute_aliases() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& m : prog_.modules) {
        for (auto& f : m->functions) {
          for_each_call(f->def->body, [&](const ast::Expr& call) {
            FunctionInfo* callee = nullptr;
            if (call.call_target == ast::CallTarget::Function) {
              callee = call.callee;
            } else if (call.call_target == ast::CallTarget::Next && f->stage_index >= 0 &&
                       static_cast<std::size_t>(f->stage_index + 1) < prog_.stages.size()) {
              callee = prog_.stages[f->stage_index + 1].flow;
            }
            if (!callee) return;
            for (std::size_t i = 0; i < call.operands.size() && i < callee->params.size(); ++i) {
              if (!callee->params[i]->type.is_array()) continue;
              for (const Symbol* r : roots(call.operands[i]->symbol, *f))
                changed |= callee->may_alias[i].insert(r).second;
            }
          });
        }
      }
    }
  }

  void check_contraction_aliasing() {
    std::function<void(const std::vector<ast::StmtPtr>&, const FunctionInfo&)> walk =
        [&](const std::vector<ast::StmtPtr>& body, const FunctionInfo& f) {
          for (const auto& s : body) {
            if (s->kind == ast::StmtKind::For) walk(s->body, f);
            if (s->form != ast::AssignForm::Contraction || !s->target) continue;
            if (s->kind != ast::StmtKind::Assign && s->kind != ast::StmtKind::Decl) continue;
            for (const auto& o : s->value->operands) {
              if (o->symbol == s->target) continue;  // reported directly already
              auto r = roots(o->symbol, f);
              if (r.count(s->target))
                diags_.error(s->value->span, "operand '" + o->symbol->name + "' may alias target '" +
                                                 s->target->name + "' of the product");
            }
          }
        };
    for (auto& m : prog_.modules)
      for (auto& f : m->functions) walk(f->def->body, *f);
  }

  void add_object(const Symbol* s, bool global, const std::string& function) {
    ArenaObject o;
    o.id = static_cast<int>(prog_.arena_objects.size());
    o.symbol = s;
    o.element = s->type.scalar;
    o.element_size = scalar_size(s->type.scalar);
    o.element_count = s->type.element_count();
    o.byte_size = o.element_size * static_cast<std::size_t>(o.element_count);
    o.alignment = o.element_size;
    o.global = global;
    o.display_name = global ? s->module + "." + s->name : s->module + "." + function + "." + s->name;
    o.c_name = global ? s->module + "__" + s->name : s->module + "__" + function + "__" + s->name;
    const_cast<Symbol*>(s)->arena_object = o.id;
    prog_.arena_objects.push_back(std::move(o));
  }

  void collect_arena_objects() {
    prog_.arena_objects.clear();
    for (auto& m : prog_.modules) {
      for (auto& g : m->globals)
        if (g->storage == Storage::Arena) add_object(g.get(), true, "");
      for (auto& f : m->functions) {
        if (!f->reachable) continue;
        for (auto& s : f->symbols)
          if (s->storage == Storage::Arena) add_object(s.get(), false, f->name);
      }
    }
  }

  void warn_dead_scalars() {}

  TypedProgram& prog_;
  DiagnosticEngine& diags_;
  FunctionInfo* cur_ = nullptr;
};

}  // namespace

TypedProgram resolve(const ast::PipelineSpec& spec, std::vector<ast::Module> modules,
                     const SourceManager& sources, std::span<const ExternDecl> extra_externs) {
  TypedProgram prog;
  prog.sources = &sources;
  DiagnosticEngine diags;
  Resolver r(prog, diags);
  auto builtins = builtin_externs();
  r.add_externs(builtins);
  r.add_externs(extra_externs);
  r.run(spec, std::move(modules));
  diags.throw_if_errors();
  prog.warnings = diags.warnings();
  return prog;
}

void typecheck(TypedProgram& program) {
  DiagnosticEngine diags;
  Checker(program, diags).run();
  diags.throw_if_errors();
  for (auto& w : diags.warnings()) program.warnings.push_back(w);
  program.typed = true;
}

}  // namespace motepy
