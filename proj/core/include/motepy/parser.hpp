// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "motepy/ast.hpp"
#include "motepy/lexer.hpp"

namespace motepy::frontend {

/// Parses one DSL module. Throws CompileError with a span on the first
/// syntax error.
ast::Module parse_module(const std::vector<Token>& tokens, std::string name);

/// Parses a `[module.function, ...]` pipeline list.
ast::PipelineSpec parse_pipeline(const std::vector<Token>& tokens);

/// Pretty-prints a module back to DSL source. Binary expressions are fully
/// parenthesized, so the output re-parses to the same tree.
std::string unparse(const ast::Module& module);
std::string unparse(const ast::Expr& expr);
std::string unparse(const ast::TypeExpr& type);
std::string unparse(const ast::PipelineSpec& spec);

/// Structural equality ignoring spans and sema annotations.
bool structurally_equal(const ast::Module& a, const ast::Module& b);
bool structurally_equal(const ast::Expr& a, const ast::Expr& b);

}  // namespace motepy::frontend
