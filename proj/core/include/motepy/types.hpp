// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace motepy {

enum class ScalarKind { Int32, Int64, UInt64, Float32 };

enum class TypeKind { Void, Scalar, Array, String };

/// A fully resolved DSL type. Arrays have a scalar element kind and one or
/// two positive extents.
struct Type {
  TypeKind kind = TypeKind::Void;
  ScalarKind scalar = ScalarKind::Int32;  // scalar kind, or element kind of an array
  std::vector<std::int64_t> dims;
  bool is_const = false;

  static Type void_type() { return {}; }
  static Type scalar_of(ScalarKind k, bool is_const = false) {
    return Type{TypeKind::Scalar, k, {}, is_const};
  }
  static Type array_of(ScalarKind elem, std::vector<std::int64_t> dims) {
    return Type{TypeKind::Array, elem, std::move(dims), false};
  }
  static Type string_type() { return Type{TypeKind::String, ScalarKind::Int32, {}, false}; }

  bool is_void() const { return kind == TypeKind::Void; }
  bool is_scalar() const { return kind == TypeKind::Scalar; }
  bool is_array() const { return kind == TypeKind::Array; }
  bool is_string() const { return kind == TypeKind::String; }
  bool is_integer() const { return is_scalar() && scalar != ScalarKind::Float32; }
  bool is_float() const { return is_scalar() && scalar == ScalarKind::Float32; }
  std::size_t rank() const { return dims.size(); }
  std::int64_t element_count() const;

  /// Same kind, element kind and extents; constness is ignored.
  bool same_shape_and_kind(const Type& other) const;
};

std::size_t scalar_size(ScalarKind k);
const char* scalar_dsl_name(ScalarKind k);  // float, int32_t, ...
const char* scalar_c_name(ScalarKind k);    // float, int32_t, ...
std::optional<ScalarKind> scalar_from_dsl_name(std::string_view name);

/// Usual arithmetic conversion for mixed scalar operands:
/// int32 -> int64 -> uint64, and any integer with float -> float.
ScalarKind promote(ScalarKind a, ScalarKind b);

std::string to_string(const Type& t);

/// A runtime scalar in one of the four DSL scalar kinds.
using ScalarValue = std::variant<std::int32_t, std::int64_t, std::uint64_t, float>;

ScalarKind kind_of(const ScalarValue& v);

/// C conversion semantics (static_cast) between scalar kinds.
ScalarValue convert(const ScalarValue& v, ScalarKind to);

}  // namespace motepy
