// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "motepy/diagnostics.hpp"
#include "motepy/types.hpp"

namespace motepy {
struct Symbol;
struct FunctionInfo;
struct ExternInfo;
}  // namespace motepy

namespace motepy::ast {

enum class BinaryOp { Add, Sub, Mul, Div };

const char* binary_op_text(BinaryOp op);

enum class ExprKind { IntLit, FloatLit, StrLit, Name, Index, Binary, Call, Cast };

// How sema resolved the callee of a Call expression.
enum class CallTarget { Unresolved, Function, Extern, Next };

// Meaning of an array-typed `*` after shape checking.
enum class ArrayOp { None, Dot, VecMat, MatVec };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceSpan span;

  std::int64_t int_value = 0;  // IntLit
  // Name / callee / cast target type name / float lexeme / string lexeme
  // (quotes and escapes kept verbatim).
  std::string text;
  BinaryOp op = BinaryOp::Add;
  // Index: base then 1-2 index expressions. Binary: lhs, rhs. Call: args.
  // Cast: the single argument.
  std::vector<ExprPtr> operands;

  // Annotations written by sema.
  Type type;
  Symbol* symbol = nullptr;
  FunctionInfo* callee = nullptr;
  ExternInfo* external = nullptr;
  CallTarget call_target = CallTarget::Unresolved;
  ArrayOp array_op = ArrayOp::None;
};

struct DimExpr {
  std::int64_t value = 0;
  std::string name;  // empty for a literal extent
  SourceSpan span;
};

struct TypeExpr {
  std::string base;
  bool is_const = false;
  std::vector<DimExpr> dims;
  SourceSpan span;
};

enum class StmtKind { Decl, Assign, ElemAssign, For, ExprStmt, Pass, Return };

// Lowering form of a whole assignment (or initialized declaration).
enum class AssignForm { Scalar, Fill, Copy, Elementwise, Contraction };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  StmtKind kind = StmtKind::Pass;
  SourceSpan span;

  std::string name;  // Decl variable, assignment target, loop variable
  SourceSpan name_span;
  TypeExpr decl_type;            // Decl
  ExprPtr value;                 // Decl initializer, assignment rhs, return value, call
  std::vector<ExprPtr> indices;  // ElemAssign
  ExprPtr lower;                 // For
  ExprPtr upper;                 // For
  std::vector<StmtPtr> body;     // For

  // Annotations written by sema.
  Symbol* target = nullptr;
  AssignForm form = AssignForm::Scalar;
};

struct Param {
  std::string name;
  TypeExpr type;
  SourceSpan span;
};

struct Decorator {
  std::string name;
  SourceSpan span;
};

struct FunctionDef {
  std::string name;
  SourceSpan span;
  std::vector<Param> params;
  TypeExpr return_type;
  std::vector<Decorator> decorators;
  std::vector<StmtPtr> body;

  bool has_decorator(const std::string& n) const {
    for (const auto& d : decorators)
      if (d.name == n) return true;
    return false;
  }
};

struct GlobalDecl {
  std::string name;
  SourceSpan span;
  TypeExpr type;
  ExprPtr init;
};

struct Module {
  std::string name;
  FileId file = 0;
  std::vector<GlobalDecl> globals;
  std::vector<FunctionDef> functions;
};

struct PipelineStage {
  std::string module;
  std::string function;
  SourceSpan span;
};

struct PipelineSpec {
  FileId file = 0;
  std::vector<PipelineStage> stages;
};

}  // namespace motepy::ast
