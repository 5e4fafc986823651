// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "motepy/lifetime.hpp"

namespace motepy {

/// One arena object to place. A local array of a helper spliced at several
/// call sites carries one interval per splice and gets a single offset.
struct AllocRequest {
  int id = 0;
  std::size_t size = 0;
  std::size_t alignment = 1;  // power of two, <= 8
  std::vector<LiveInterval> intervals;

  int start() const;
  int end() const;
  bool persistent() const;
};

struct ArenaLayout {
  std::map<int, std::size_t> offsets;  // request id -> byte offset
  std::size_t total = 0;
  std::vector<std::pair<int, int>> conflict_edges;  // request ids, first < second
};

bool conflicts(const LiveInterval& a, const LiveInterval& b);
bool conflicts(const AllocRequest& a, const AllocRequest& b);

/// Greedy first-fit: largest first, then earliest start, then lowest id.
ArenaLayout plan_arena(std::span<const AllocRequest> requests);

struct LayoutViolation {
  int a = -1;
  int b = -1;  // -1 for single-request violations
  std::string message;
};

std::vector<LayoutViolation> verify_layout(std::span<const AllocRequest> requests,
                                           const ArenaLayout& layout);

/// Largest sum of sizes live at a single program point.
std::size_t lower_bound(std::span<const AllocRequest> requests);

/// Exact minimum arena size for at most kBruteforceLimit requests.
/// Throws std::invalid_argument on larger inputs.
inline constexpr std::size_t kBruteforceLimit = 8;
std::size_t optimal_arena_bruteforce(std::span<const AllocRequest> requests);

std::vector<AllocRequest> alloc_requests(const TypedProgram& program,
                                         std::span<const LiveInterval> intervals);

std::string dump_arena(const TypedProgram& program, std::span<const AllocRequest> requests,
                       const ArenaLayout& layout);

inline std::size_t align_up(std::size_t x, std::size_t a) { return (x + a - 1) / a * a; }

}  // namespace motepy
