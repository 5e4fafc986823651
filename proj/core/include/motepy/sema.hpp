// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "motepy/ast.hpp"
#include "motepy/diagnostics.hpp"
#include "motepy/types.hpp"

namespace motepy {

enum class Storage {
  Arena,           // global or function-local array
  Stack,           // local scalar, loop counters included
  Constant,        // const scalar global
  ParameterAlias,  // array parameter, aliases the caller's object
  ParameterValue,  // scalar parameter
  External,        // pass-through C name
};

const char* storage_name(Storage s);

struct Symbol {
  std::string name;
  std::string module;
  std::string function;  // empty for globals
  Type type;
  Storage storage = Storage::Stack;
  SourceSpan span;

  const ast::Expr* const_init = nullptr;  // Constant
  ScalarValue const_value = std::int32_t{0};
  int arena_object = -1;  // index into TypedProgram::arena_objects
  int param_index = -1;
  bool is_loop_var = false;
  bool is_read = false;  // scalar locals only; lets codegen silence unused warnings
};

/// A C function reachable without a DSL definition.
struct ExternInfo {
  std::string name;
  std::string c_name;
  bool is_function = true;
  bool varargs = false;
  // Fixed parameters. An Array type with empty dims stands for an
  // element pointer (`float*`) and accepts any array of that element kind.
  std::vector<Type> params;
  Type result;
  bool known = false;  // from the built-in table or --extern
  bool has_value = false;
  ScalarValue value = std::int32_t{0};
};

struct FunctionInfo {
  std::string module;
  std::string name;
  std::string mangled;  // module__function
  const ast::FunctionDef* def = nullptr;
  bool is_flow = false;
  bool is_init = false;
  int stage_index = -1;  // position in the pipeline, if this is a stage
  Type return_type;
  std::vector<Symbol*> params;
  std::vector<std::unique_ptr<Symbol>> symbols;  // params then locals
  std::vector<FunctionInfo*> callees;
  const ast::Stmt* next_stmt = nullptr;
  bool reachable = false;
  // Arena symbols each array parameter may alias, over all call sites.
  std::vector<std::set<const Symbol*>> may_alias;
};

struct ModuleInfo {
  std::string name;
  ast::Module ast;
  std::vector<std::unique_ptr<Symbol>> globals;
  std::map<std::string, Symbol*> global_by_name;
  std::vector<std::unique_ptr<FunctionInfo>> functions;
  std::map<std::string, FunctionInfo*> function_by_name;
  FunctionInfo* init = nullptr;
};

struct StageInfo {
  ModuleInfo* module = nullptr;
  FunctionInfo* flow = nullptr;
  SourceSpan span;
};

/// An array object that lives in the static arena.
struct ArenaObject {
  int id = 0;
  const Symbol* symbol = nullptr;
  ScalarKind element = ScalarKind::Float32;
  std::size_t element_size = 4;
  std::int64_t element_count = 0;
  std::size_t byte_size = 0;
  std::size_t alignment = 4;
  bool global = true;
  std::string display_name;  // module.name or module.function.name
  std::string c_name;        // module__name or module__function__name
};

/// Name-resolved, type-checked program. Owns the module ASTs; sema
/// annotations on those ASTs point into this object, so it is move-only.
struct TypedProgram {
  TypedProgram() = default;
  TypedProgram(TypedProgram&&) = default;
  TypedProgram& operator=(TypedProgram&&) = default;
  TypedProgram(const TypedProgram&) = delete;
  TypedProgram& operator=(const TypedProgram&) = delete;

  const SourceManager* sources = nullptr;
  FileId pipeline_file = 0;
  std::vector<std::unique_ptr<ModuleInfo>> modules;  // first-appearance order in the pipeline
  std::vector<StageInfo> stages;
  std::vector<std::unique_ptr<ExternInfo>> externs;
  std::vector<ArenaObject> arena_objects;
  std::vector<Diagnostic> warnings;
  bool typed = false;

  ModuleInfo* module(const std::string& name) const;
  ExternInfo* find_extern(const std::string& name) const;
  /// Modules whose init runs, in stage order without duplicates.
  std::vector<ModuleInfo*> init_order() const;
};

/// Signature of a C name usable without a DSL definition.
struct ExternDecl {
  std::string name;
  std::string c_name;
  bool is_function = true;
  bool varargs = false;
  std::vector<Type> params;
  Type result;
  bool has_value = false;
  ScalarValue value = std::int32_t{0};
};

/// Built-in table: printf, rand, exp (lowered to expf) and RAND_MAX.
std::vector<ExternDecl> builtin_externs();

/// Parses a `--extern` string: `name:(float,int32_t)->float`,
/// `name:(...)->int32_t`, `name:(float*)->void` or `name:float` for a value.
/// Throws std::invalid_argument on malformed input.
ExternDecl parse_extern_signature(const std::string& text);

/// Binds every identifier, builds symbol tables and the call graph, and
/// checks module/pipeline structure. Errors are thrown as CompileError.
TypedProgram resolve(const ast::PipelineSpec& spec, std::vector<ast::Module> modules,
                     const SourceManager& sources, std::span<const ExternDecl> extra_externs = {});

/// Annotates every expression with a type and checks assignment, shape and
/// wiring rules. Throws CompileError on failure; warnings are kept in
/// program.warnings.
void typecheck(TypedProgram& program);

struct MulShape {
  bool ok = false;
  ast::ArrayOp op = ast::ArrayOp::None;
  std::vector<std::int64_t> dims;  // empty for a dot product
  std::string error;
};

/// [N]x[N] -> scalar, [N]x[N][M] -> [M], [N][M]x[M] -> [N]; anything else
/// is an error.
MulShape shape_of_mul(std::span<const std::int64_t> lhs, std::span<const std::int64_t> rhs);

/// Resolves a type annotation against a module's constants. Extents must be
/// positive and named extents must be const integer globals.
Type resolve_type(const ast::TypeExpr& t, const ModuleInfo& module, DiagnosticEngine& diags);

}  // namespace motepy
