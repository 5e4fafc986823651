// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "motepy/arena.hpp"
#include "motepy/sema.hpp"

namespace motepy {

struct CodegenOptions {
  std::vector<std::string> extra_includes;  // `foo.h`, `<foo.h>` or `"foo.h"`
  std::string header_comment;               // emitted as a leading comment when non-empty
};

struct CTranslationUnit {
  std::string text;
};

/// An array operand as C sees it: an lvalue-able base expression plus shape.
struct CArray {
  std::string base;  // indexable with [i] or [i][j]
  Type type;
};

// Each lowering returns a brace-enclosed C block indented by `indent` levels.
std::string lower_fill(const CArray& target, const std::string& scalar, int indent = 1);
std::string lower_elementwise(const CArray& target, const CArray& lhs, ast::BinaryOp op,
                              const CArray& rhs, int indent = 1);
std::string lower_contraction(const std::string& target, ScalarKind target_kind, const CArray& lhs,
                              const CArray& rhs, int indent = 1);

CTranslationUnit emit_translation_unit(const TypedProgram& program, const ArenaLayout& layout,
                                       const CodegenOptions& opts = {});

/// The `main` function: argument parsing, module inits, pipeline loop.
std::string emit_driver(const TypedProgram& program);

/// Float constant spelled so a C compiler reads back the same float.
std::string c_float_literal(float v);

}  // namespace motepy
