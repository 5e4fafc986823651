// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

// Exact arena sizing for small instances. Any optimal layout can be
// left-justified so every block sits at 0 or at the aligned end of a
// conflicting block below it; visiting blocks in nondecreasing offset order
// then enumerates every justified layout.

#include <algorithm>
#include <stdexcept>

#include "motepy/arena.hpp"

namespace motepy {

namespace {

struct Search {
  std::span<const AllocRequest> req;
  std::vector<std::vector<bool>> conflict;
  std::vector<std::size_t> offset;
  std::vector<bool> placed;
  std::size_t best = 0;
  std::size_t floor = 0;

  bool fits(std::size_t r, std::size_t x) const {
    for (std::size_t b = 0; b < req.size(); ++b) {
      if (!placed[b] || !conflict[r][b]) continue;
      if (x < offset[b] + req[b].size && offset[b] < x + req[r].size) return false;
    }
    return true;
  }

  void dfs(std::size_t count, std::size_t last, std::size_t high) {
    if (best == floor) return;
    if (count == req.size()) {
      best = std::min(best, high);
      return;
    }
    for (std::size_t r = 0; r < req.size(); ++r) {
      if (placed[r]) continue;
      std::vector<std::size_t> cand{0};
      for (std::size_t b = 0; b < req.size(); ++b)
        if (placed[b] && conflict[r][b]) cand.push_back(align_up(offset[b] + req[b].size, req[r].alignment));
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      for (std::size_t x : cand) {
        if (x < last || x + req[r].size >= best || !fits(r, x)) continue;
        placed[r] = true;
        offset[r] = x;
        dfs(count + 1, x, std::max(high, x + req[r].size));
        placed[r] = false;
      }
    }
  }
};

}  // namespace

std::size_t optimal_arena_bruteforce(std::span<const AllocRequest> requests) {
  if (requests.size() > kBruteforceLimit)
    throw std::invalid_argument("optimal_arena_bruteforce handles at most " +
                                std::to_string(kBruteforceLimit) + " requests");
  if (requests.empty()) return 0;
  Search s;
  s.req = requests;
  const std::size_t n = requests.size();
  s.conflict.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s.conflict[i][j] = conflicts(requests[i], requests[j]);
  s.offset.assign(n, 0);
  s.placed.assign(n, false);
  // Stacking every block is always feasible.
  std::size_t stacked = 0;
  for (const auto& r : requests) stacked = align_up(stacked, r.alignment) + r.size;
  s.best = stacked + 1;
  s.floor = lower_bound(requests);
  s.dfs(0, 0, 0);
  return std::min(s.best, stacked);
}

}  // namespace motepy
