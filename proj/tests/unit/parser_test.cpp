// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "motepy/parser.hpp"
#include "program_gen.hpp"
#include "test_util.hpp"

using namespace motepy;
using namespace motepy::frontend;

namespace {

ast::Module parse(const std::string& src, FileId file = 0) { return parse_module(tokenize(src, file), "m"); }

std::string parse_error(const std::string& src, SourceSpan* span = nullptr) {
  try {
    parse(src, 3);
  } catch (const CompileError& e) {
    if (span) *span = e.diagnostics().front().span;
    return e.diagnostics().front().message;
  }
  return "";
}

void expect_round_trip(const std::string& src) {
  ast::Module a = parse(src);
  std::string text = unparse(a);
  ast::Module b = parse(text);
  EXPECT_TRUE(structurally_equal(a, b)) << "source:\n" << src << "\nunparsed:\n" << text;
  EXPECT_EQ(unparse(b), text);
}

}  // namespace

TEST(Parser, ModelModule) {
  std::string src = motepy::testing::compile_corpus("model_pipeline")->sources.contents(2);
  ast::Module m = parse(src);
  ASSERT_EQ(m.globals.size(), 4u);
  EXPECT_EQ(m.globals[0].name, "N");
  EXPECT_TRUE(m.globals[0].type.is_const);
  EXPECT_EQ(m.globals[2].type.dims.size(), 2u);
  EXPECT_EQ(m.globals[2].type.dims[0].name, "N");
  ASSERT_EQ(m.functions.size(), 3u);
  const ast::FunctionDef& predict = m.functions[2];
  EXPECT_EQ(predict.name, "predict");
  EXPECT_TRUE(predict.has_decorator("flow"));
  ASSERT_EQ(predict.params.size(), 1u);
  EXPECT_EQ(predict.params[0].type.dims[0].name, "N");
  EXPECT_EQ(predict.body[3]->kind, ast::StmtKind::Assign);
  EXPECT_EQ(predict.body[3]->value->kind, ast::ExprKind::Binary);
}

TEST(Parser, Pipeline) {
  auto spec = parse_pipeline(tokenize("[\ndatasource.acquire,\nmodel.predict\n]\n", 0));
  ASSERT_EQ(spec.stages.size(), 2u);
  EXPECT_EQ(spec.stages[0].module, "datasource");
  EXPECT_EQ(spec.stages[1].function, "predict");
  auto trailing = parse_pipeline(tokenize("[a.f, b.g,]\n", 0));
  EXPECT_EQ(trailing.stages.size(), 2u);
}

TEST(Parser, PipelineErrors) {
  auto err = [](const std::string& s) {
    try {
      parse_pipeline(tokenize(s, 0));
    } catch (const CompileError& e) {
      return e.diagnostics().front().message;
    }
    return std::string();
  };
  EXPECT_NE(err("[]\n").find("empty"), std::string::npos);
  EXPECT_NE(err("[a.f, a.f]\n").find("duplicate"), std::string::npos);
  EXPECT_NE(err("[a]\n").find("module.function"), std::string::npos);
  EXPECT_NE(err("a.f\n").find("list"), std::string::npos);
}

TEST(Parser, ElementAssignmentAndIndexing) {
  ast::Module m = parse("def f() -> void:\n    a[i][j] = b[j] * 2.0\n");
  const ast::Stmt& s = *m.functions[0].body[0];
  EXPECT_EQ(s.kind, ast::StmtKind::ElemAssign);
  EXPECT_EQ(s.name, "a");
  EXPECT_EQ(s.indices.size(), 2u);
  const ast::Expr& rhs = *s.value;
  ASSERT_EQ(rhs.operands[0]->kind, ast::ExprKind::Index);
  EXPECT_EQ(rhs.operands[0]->operands[0]->kind, ast::ExprKind::Name);
}

TEST(Parser, Precedence) {
  ast::Module m = parse("def f() -> void:\n    x = a + b * c - d / e\n");
  EXPECT_EQ(unparse(*m.functions[0].body[0]->value), "((a + (b * c)) - (d / e))");
  ast::Module n = parse("def f() -> void:\n    x = -y - -2\n");
  EXPECT_EQ(unparse(*n.functions[0].body[0]->value), "((0 - y) - -2)");
}

TEST(Parser, ForLoop) {
  ast::Module m = parse("def f() -> void:\n    for i in range(0, N):\n        a[i] = 0\n        pass\n");
  const ast::Stmt& s = *m.functions[0].body[0];
  EXPECT_EQ(s.kind, ast::StmtKind::For);
  EXPECT_EQ(s.name, "i");
  EXPECT_EQ(s.upper->text, "N");
  EXPECT_EQ(s.body.size(), 2u);
}

TEST(Parser, RoundTripCorpus) {
  for (const char* name : {"model_pipeline", "address_reuse", "persistent_across_iterations"}) {
    auto c = motepy::testing::compile_corpus(name);
    for (FileId f = 1; f < c->sources.size(); ++f) expect_round_trip(c->sources.contents(f));
  }
}

TEST(Parser, RoundTripGenerated) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto p = motepy::testing::generate_program(seed);
    for (const auto& [name, text] : p.modules) expect_round_trip(text);
  }
}

TEST(Parser, ErrorsPointInsideTheFile) {
  struct Case {
    const char* src;
    const char* message;
    unsigned line;
  };
  const Case cases[] = {
      {"def f() -> void:\n    for i in 3:\n        pass\n", "range", 2},
      {"@inline\ndef f() -> void:\n    pass\n", "unknown decorator", 1},
      {"def f() -> void:\n    x = a[1][2][3]\n", "rank beyond 2", 2},
      {"def f() -> void:\n    f() = 3\n", "invalid assignment target", 2},
      {"def f() -> void:\npass\n", "indented block", 2},
      {"x: float[2][3][4]\n", "rank beyond 2", 1},
      {"def f() -> void:\n    def g() -> void:\n        pass\n", "nested functions", 2},
      {"def f() -> void:\n    x = (1 + \n", "expected an expression", 3},
  };
  for (const auto& c : cases) {
    SourceSpan span;
    std::string msg = parse_error(c.src, &span);
    EXPECT_NE(msg.find(c.message), std::string::npos) << c.src << " -> " << msg;
    EXPECT_EQ(span.file, 3u);
    EXPECT_EQ(span.line, c.line) << c.src;
    EXPECT_GE(span.col, 1u);
  }
}
