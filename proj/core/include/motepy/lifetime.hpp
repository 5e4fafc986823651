// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "motepy/sema.hpp"

namespace motepy {

enum class Phase { Init, Loop };

/// One analysis-time inlined execution of a function body. Array parameters
/// are bound to the concrete instance the caller passed.
struct Activation {
  int id = 0;
  const FunctionInfo* function = nullptr;
  int parent = -1;
  std::map<const Symbol*, int> bindings;  // array parameter -> instance id
};

/// A concrete object at runtime: a global array, or a local array declared
/// in one activation. Several instances may share an ArenaObject when a
/// helper is spliced at more than one call site.
struct Instance {
  int id = 0;
  int object = 0;       // ArenaObject id
  int activation = -1;  // -1 for globals
};

struct ProgramPoint {
  int index = 0;
  const ast::Stmt* stmt = nullptr;
  Phase phase = Phase::Init;
  int activation = 0;
};

struct LoopRange {
  int header = 0;
  int body_first = 0;
  int body_last = 0;
};

struct Linearization {
  std::vector<ProgramPoint> points;
  std::vector<Activation> activations;
  std::vector<Instance> instances;
  std::vector<LoopRange> loops;
  int loop_first = 0;  // first loop-phase point; == points.size() when empty
  std::vector<int> init_activations;  // one per module in init order
  int pipeline_activation = -1;       // stage 1 flow

  std::map<std::pair<const ast::Stmt*, int>, int> point_of;
  // Helper calls and next() calls -> the callee activation.
  std::map<std::pair<const ast::Expr*, int>, int> call_activation;
  std::map<std::pair<const Symbol*, int>, int> local_instance;

  /// Instance denoted by an array symbol inside an activation, following
  /// parameter bindings. -1 when the symbol is not an array.
  int instance_of(const Symbol* s, int activation) const;
  std::vector<int> successors(int point) const;
};

Linearization linearize(const TypedProgram& program);

struct DefsUses {
  std::vector<int> uses;    // instance ids
  std::vector<int> defs;
  std::vector<int> kills;   // subset of defs
  std::vector<int> escapes; // address handed to external C code
};

DefsUses defs_uses(const Linearization& lin, int point);

class InstanceSet {
 public:
  explicit InstanceSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool merge(const InstanceSet& o);
  bool operator==(const InstanceSet& o) const { return words_ == o.words_; }

 private:
  std::vector<std::uint64_t> words_;
};

struct Liveness {
  std::vector<DefsUses> transfer;
  std::vector<InstanceSet> live_in;
  std::vector<InstanceSet> live_out;
};

/// Backward may-liveness over the linearization with for-loop and
/// pipeline back-edges, iterated to a fixpoint.
Liveness compute_liveness(const Linearization& lin);

struct LiveInterval {
  int object = 0;
  int instance = 0;
  int start = 0;
  int end = 0;  // inclusive
  bool persistent = false;
};

/// One interval per instance, ordered by instance id. Objects that are
/// never touched get a zero-length interval at their declaration point.
std::vector<LiveInterval> live_intervals(const TypedProgram& program, const Linearization& lin,
                                         const Liveness& liveness,
                                         std::vector<Diagnostic>* warnings = nullptr);

/// Everything the allocator needs, computed in one go.
struct LifetimeResult {
  Linearization lin;
  Liveness liveness;
  std::vector<LiveInterval> intervals;
};

LifetimeResult analyze_lifetimes(TypedProgram& program);

std::string dump_liveness(const TypedProgram& program, const LifetimeResult& lifetimes);

}  // namespace motepy
