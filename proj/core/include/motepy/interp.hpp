// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "motepy/arena.hpp"
#include "motepy/lifetime.hpp"
#include "motepy/sema.hpp"

namespace motepy {

enum class Access { Read, Write };

struct TraceRecord {
  int point = 0;
  int object = 0;
  int instance = 0;
  Access kind = Access::Read;
};

struct Trace {
  std::vector<TraceRecord> records;  // consecutive duplicates collapsed
  std::string output;                // what the program printed
  std::map<int, std::vector<ScalarValue>> values;  // final contents per object id
};

/// An argument as seen by an external C function stub.
struct ExternArg {
  enum class Kind { Scalar, String, Array } kind = Kind::Scalar;
  ScalarValue scalar = std::int32_t{0};
  std::string text;           // string literal with escapes decoded
  std::uint64_t address = 0;  // simulated base address of an array
};

struct ExternContext {
  std::string& output;
};

using ExternStub = std::function<ScalarValue(std::span<const ExternArg>, ExternContext&)>;

struct ExternStubs {
  std::map<std::string, ExternStub> functions;
  std::map<std::string, ScalarValue> values;
};

/// printf capturing to the transcript, a deterministic rand (the classic
/// portable LCG seeded with 1, RAND_MAX 32767), exp as expf.
ExternStubs default_stubs();

/// Raised for configuration problems (missing stubs, unsupported printf
/// conversions) and runtime faults (out-of-bounds index, division by zero).
class InterpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InterpOptions {
  std::uint64_t iterations = 1;
  const ArenaLayout* layout = nullptr;  // for uint64_t(array); optional
  std::uint64_t fake_arena_base = 0x10000;
  bool record_trace = true;
};

Trace interpret(const TypedProgram& program, const Linearization& lin, const InterpOptions& opts,
                const ExternStubs& stubs);

/// C-style formatting of one printf call; throws InterpError on conversions
/// outside d i u x X o c s f F e E g G a A p %.
std::string format_printf(const std::string& format, std::span<const ExternArg> args);

/// Decodes C escape sequences in a quoted string literal lexeme.
std::string decode_string_literal(const std::string& lexeme);

/// Scalar arithmetic with C semantics in kind `k` (operands converted first;
/// signed integer overflow wraps).
ScalarValue apply_binary(ast::BinaryOp op, const ScalarValue& a, const ScalarValue& b, ScalarKind k);

}  // namespace motepy
