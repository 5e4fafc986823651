// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/types.hpp"

namespace motepy {

std::int64_t Type::element_count() const {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

bool Type::same_shape_and_kind(const Type& other) const {
  if (kind != other.kind) return false;
  if (kind == TypeKind::Scalar || kind == TypeKind::Array)
    return scalar == other.scalar && dims == other.dims;
  return true;
}

std::size_t scalar_size(ScalarKind k) {
  switch (k) {
    case ScalarKind::Int32: return 4;
    case ScalarKind::Float32: return 4;
    case ScalarKind::Int64: return 8;
    case ScalarKind::UInt64: return 8;
  }
  return 0;
}

const char* scalar_dsl_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::Int32: return "int32_t";
    case ScalarKind::Int64: return "int64_t";
    case ScalarKind::UInt64: return "uint64_t";
    case ScalarKind::Float32: return "float";
  }
  return "?";
}

const char* scalar_c_name(ScalarKind k) { return scalar_dsl_name(k); }

std::optional<ScalarKind> scalar_from_dsl_name(std::string_view name) {
  if (name == "float") return ScalarKind::Float32;
  if (name == "int32_t") return ScalarKind::Int32;
  if (name == "int64_t") return ScalarKind::Int64;
  if (name == "uint64_t") return ScalarKind::UInt64;
  return std::nullopt;
}

ScalarKind promote(ScalarKind a, ScalarKind b) {
  if (a == ScalarKind::Float32 || b == ScalarKind::Float32) return ScalarKind::Float32;
  if (a == ScalarKind::UInt64 || b == ScalarKind::UInt64) return ScalarKind::UInt64;
  if (a == ScalarKind::Int64 || b == ScalarKind::Int64) return ScalarKind::Int64;
  return ScalarKind::Int32;
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::Void: return "void";
    case TypeKind::String: return "string";
    case TypeKind::Scalar:
      return std::string(t.is_const ? "const " : "") + scalar_dsl_name(t.scalar);
    case TypeKind::Array: {
      std::string s = scalar_dsl_name(t.scalar);
      for (auto d : t.dims) s += "[" + std::to_string(d) + "]";
      return s;
    }
  }
  return "?";
}

ScalarKind kind_of(const ScalarValue& v) {
  switch (v.index()) {
    case 0: return ScalarKind::Int32;
    case 1: return ScalarKind::Int64;
    case 2: return ScalarKind::UInt64;
    default: return ScalarKind::Float32;
  }
}

ScalarValue convert(const ScalarValue& v, ScalarKind to) {
  return std::visit(
      [to](auto x) -> ScalarValue {
        switch (to) {
          case ScalarKind::Int32: return static_cast<std::int32_t>(x);
          case ScalarKind::Int64: return static_cast<std::int64_t>(x);
          case ScalarKind::UInt64: return static_cast<std::uint64_t>(x);
          case ScalarKind::Float32: return static_cast<float>(x);
        }
        return x;
      },
      v);
}

}  // namespace motepy
