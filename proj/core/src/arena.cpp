// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/arena.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace motepy {

int AllocRequest::start() const {
  int s = intervals.empty() ? 0 : intervals.front().start;
  for (const auto& iv : intervals) s = std::min(s, iv.start);
  return s;
}

int AllocRequest::end() const {
  int e = intervals.empty() ? 0 : intervals.front().end;
  for (const auto& iv : intervals) e = std::max(e, iv.end);
  return e;
}

bool AllocRequest::persistent() const {
  return std::any_of(intervals.begin(), intervals.end(), [](const LiveInterval& iv) { return iv.persistent; });
}

bool conflicts(const LiveInterval& a, const LiveInterval& b) {
  return a.persistent || b.persistent || std::max(a.start, b.start) <= std::min(a.end, b.end);
}

bool conflicts(const AllocRequest& a, const AllocRequest& b) {
  for (const auto& x : a.intervals)
    for (const auto& y : b.intervals)
      if (conflicts(x, y)) return true;
  return false;
}

ArenaLayout plan_arena(std::span<const AllocRequest> requests) {
  ArenaLayout layout;
  const std::size_t n = requests.size();
  std::vector<std::vector<bool>> conflict(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (conflicts(requests[i], requests[j])) {
        conflict[i][j] = conflict[j][i] = true;
        layout.conflict_edges.emplace_back(std::min(requests[i].id, requests[j].id),
                                           std::max(requests[i].id, requests[j].id));
      }
  std::sort(layout.conflict_edges.begin(), layout.conflict_edges.end());

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = requests[a];
    const auto& rb = requests[b];
    return std::make_tuple(rb.size, ra.start(), ra.id) < std::make_tuple(ra.size, rb.start(), rb.id);
  });

  std::vector<std::size_t> offset(n, 0);
  std::vector<std::size_t> placed;
  for (std::size_t idx : order) {
    const auto& r = requests[idx];
    std::vector<std::pair<std::size_t, std::size_t>> busy;  // [begin, end)
    for (std::size_t p : placed)
      if (conflict[idx][p]) busy.emplace_back(offset[p], offset[p] + requests[p].size);
    std::sort(busy.begin(), busy.end());
    std::size_t x = 0;
    for (const auto& [b, e] : busy)
      if (b < x + r.size && x < e) x = align_up(e, r.alignment);
    offset[idx] = x;
    placed.push_back(idx);
    layout.offsets[r.id] = x;
    layout.total = std::max(layout.total, x + r.size);
  }
  return layout;
}

std::vector<LayoutViolation> verify_layout(std::span<const AllocRequest> requests,
                                           const ArenaLayout& layout) {
  std::vector<LayoutViolation> out;
  std::size_t high = 0;
  for (const auto& r : requests) {
    auto it = layout.offsets.find(r.id);
    if (it == layout.offsets.end()) {
      out.push_back({r.id, -1, "request has no placement"});
      continue;
    }
    if (r.alignment == 0 || it->second % r.alignment != 0)
      out.push_back({r.id, -1, "offset " + std::to_string(it->second) + " is not aligned to " +
                                   std::to_string(r.alignment)});
    high = std::max(high, it->second + r.size);
  }
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (std::size_t j = i + 1; j < requests.size(); ++j) {
      const auto& a = requests[i];
      const auto& b = requests[j];
      auto ia = layout.offsets.find(a.id);
      auto ib = layout.offsets.find(b.id);
      if (ia == layout.offsets.end() || ib == layout.offsets.end()) continue;
      bool live_together = false;
      for (const auto& x : a.intervals)
        for (const auto& y : b.intervals)
          live_together |= x.persistent || y.persistent || !(x.end < y.start || y.end < x.start);
      if (!live_together) continue;
      std::size_t a0 = ia->second, a1 = a0 + a.size, b0 = ib->second, b1 = b0 + b.size;
      if (a0 < b1 && b0 < a1)
        out.push_back({a.id, b.id, "live-overlapping requests share bytes [" +
                                       std::to_string(std::max(a0, b0)) + ", " +
                                       std::to_string(std::min(a1, b1)) + ")"});
    }
  }
  if (layout.total != high)
    out.push_back({-1, -1, "total " + std::to_string(layout.total) + " differs from highest end " +
                               std::to_string(high)});
  return out;
}

std::size_t lower_bound(std::span<const AllocRequest> requests) {
  std::set<int> probes;
  for (const auto& r : requests)
    for (const auto& iv : r.intervals) probes.insert(iv.start);
  std::size_t best = 0;
  for (int p : probes) {
    std::size_t sum = 0;
    for (const auto& r : requests) {
      bool live = std::any_of(r.intervals.begin(), r.intervals.end(), [p](const LiveInterval& iv) {
        return iv.persistent || (iv.start <= p && p <= iv.end);
      });
      if (live) sum += r.size;
    }
    best = std::max(best, sum);
  }
  return best;
}

std::vector<AllocRequest> alloc_requests(const TypedProgram& program,
                                         std::span<const LiveInterval> intervals) {
  std::vector<AllocRequest> out;
  for (const auto& o : program.arena_objects) {
    AllocRequest r;
    r.id = o.id;
    r.size = o.byte_size;
    r.alignment = o.alignment;
    for (const auto& iv : intervals)
      if (iv.object == o.id) r.intervals.push_back(iv);
    out.push_back(std::move(r));
  }
  return out;
}

std::string dump_arena(const TypedProgram& program, std::span<const AllocRequest> requests,
                       const ArenaLayout& layout) {
  struct Row {
    std::size_t offset;
    std::string name;
    const AllocRequest* req;
  };
  std::vector<Row> rows;
  for (const auto& r : requests)
    rows.push_back({layout.offsets.at(r.id), program.arena_objects.at(r.id).display_name, &r});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.offset, a.name) < std::tie(b.offset, b.name);
  });
  std::ostringstream os;
  os << "arena total=" << layout.total << '\n';
  for (const auto& row : rows) {
    os << row.name << " offset=" << row.offset << " size=" << row.req->size << " start=" << row.req->start()
       << " end=" << row.req->end() << " persistent=" << (row.req->persistent() ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace motepy
