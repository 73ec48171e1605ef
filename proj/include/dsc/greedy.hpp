#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "dsc/level_arith.hpp"

namespace dsc {

struct GreedyPick {
  uint32_t set = 0;
  Level level = 0;
  std::vector<uint32_t> members;  // ascending item id
};

struct GreedyInput {
  // Parallel arrays describing the residual instance. members[i] lists, for
  // candidate i, the universe items it can still cover (duplicates not
  // allowed). Item ids are arbitrary but must be dense enough to index the
  // scratch arrays below.
  std::vector<uint32_t> ids;
  std::vector<double> costs;
  std::vector<std::vector<uint32_t>> members;
  uint32_t item_id_bound = 0;  // item ids are < this
  size_t universe_size = 0;    // distinct items that must be covered
};

// Static weighted greedy with per-ratio-level buckets and a descending top
// pointer. Selection is by highest level of floor(log_beta(live/cost)), ties
// by lowest candidate id; each pick is emitted at that level with its
// still-uncovered members.
inline std::vector<GreedyPick> greedy_cover(const BetaTable& bt,
                                            const GreedyInput& in) {
  const size_t m = in.ids.size();
  std::vector<GreedyPick> out;
  if (in.universe_size == 0) return out;

  // item -> candidate indices that contain it
  std::vector<std::vector<uint32_t>> holders(in.item_id_bound);
  std::vector<char> covered(in.item_id_bound, 0);
  std::vector<int64_t> live(m, 0);
  Level lo = 0, hi = 0;
  bool first = true;
  for (size_t i = 0; i < m; ++i) {
    live[i] = static_cast<int64_t>(in.members[i].size());
    for (uint32_t e : in.members[i]) holders[e].push_back(static_cast<uint32_t>(i));
    if (live[i] == 0) continue;
    const Level floor_lv = bt.level_of_ratio(1, in.costs[i]);
    const Level cur = bt.level_of_ratio(live[i], in.costs[i]);
    if (first) {
      lo = floor_lv;
      hi = cur;
      first = false;
    } else {
      lo = std::min(lo, floor_lv);
      hi = std::max(hi, cur);
    }
  }
  if (first) throw std::invalid_argument("infeasible residual instance");

  auto level_of = [&](size_t i) {
    return bt.level_of_ratio(live[i], in.costs[i]);
  };

  using MinHeap =
      std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>>;
  std::vector<MinHeap> buckets(static_cast<size_t>(hi - lo + 1));
  auto bucket_of = [&](Level l) { return static_cast<size_t>(l - lo); };
  for (size_t i = 0; i < m; ++i)
    if (live[i] > 0) buckets[bucket_of(level_of(i))].push(static_cast<uint32_t>(i));

  size_t remaining = in.universe_size;
  Level top = hi;
  Level last_pick_level = hi;
  while (remaining > 0) {
    // revalidate lazily: entries whose level dropped go to their true bucket
    int64_t chosen = -1;
    while (top >= lo) {
      MinHeap& b = buckets[bucket_of(top)];
      while (!b.empty()) {
        const uint32_t i = b.top();
        if (live[i] == 0) {
          b.pop();
          continue;
        }
        const Level cur = level_of(i);
        if (cur == top) {
          chosen = i;
          break;
        }
        b.pop();
        buckets[bucket_of(cur)].push(i);
      }
      if (chosen >= 0) break;
      --top;
    }
    if (chosen < 0) throw std::invalid_argument("infeasible residual instance");
    const size_t i = static_cast<size_t>(chosen);
    buckets[bucket_of(top)].pop();

    GreedyPick pick;
    pick.set = in.ids[i];
    pick.level = top;
    if (top > last_pick_level)
      throw std::logic_error("greedy level pointer rose");
    last_pick_level = top;
    for (uint32_t e : in.members[i]) {
      if (covered[e]) continue;
      covered[e] = 1;
      pick.members.push_back(e);
      for (uint32_t h : holders[e]) --live[h];
    }
    std::sort(pick.members.begin(), pick.members.end());
    remaining -= pick.members.size();
    out.push_back(std::move(pick));
  }
  return out;
}

// Round-by-round rescan twin of greedy_cover: same bucket-level selection and
// tie rule, no bucket queue. Differential oracle for the implementation above.
inline std::vector<GreedyPick> greedy_cover_naive(const BetaTable& bt,
                                                  const GreedyInput& in) {
  std::vector<GreedyPick> out;
  std::vector<char> covered(in.item_id_bound, 0);
  size_t remaining = in.universe_size;
  const size_t m = in.ids.size();
  while (remaining > 0) {
    int64_t best = -1;
    Level best_level = 0;
    int64_t best_live = 0;
    for (size_t i = 0; i < m; ++i) {
      int64_t live = 0;
      for (uint32_t e : in.members[i])
        if (!covered[e]) ++live;
      if (live == 0) continue;
      const Level l = bt.level_of_ratio(live, in.costs[i]);
      if (best < 0 || l > best_level ||
          (l == best_level && in.ids[i] < in.ids[static_cast<size_t>(best)])) {
        best = static_cast<int64_t>(i);
        best_level = l;
        best_live = live;
      }
    }
    if (best < 0) throw std::invalid_argument("infeasible residual instance");
    GreedyPick pick;
    pick.set = in.ids[static_cast<size_t>(best)];
    pick.level = best_level;
    for (uint32_t e : in.members[static_cast<size_t>(best)]) {
      if (covered[e]) continue;
      covered[e] = 1;
      pick.members.push_back(e);
    }
    std::sort(pick.members.begin(), pick.members.end());
    remaining -= pick.members.size();
    (void)best_live;
    out.push_back(std::move(pick));
  }
  return out;
}

// Exact max-ratio greedy (live/cost, ties by lowest id). Baseline only; the
// engine's resets use the bucket-level variants above.
inline std::vector<GreedyPick> greedy_cover_exact_ratio(const BetaTable& bt,
                                                        const GreedyInput& in) {
  std::vector<GreedyPick> out;
  std::vector<char> covered(in.item_id_bound, 0);
  size_t remaining = in.universe_size;
  const size_t m = in.ids.size();
  while (remaining > 0) {
    int64_t best = -1;
    double best_ratio = 0.0;
    for (size_t i = 0; i < m; ++i) {
      int64_t live = 0;
      for (uint32_t e : in.members[i])
        if (!covered[e]) ++live;
      if (live == 0) continue;
      const double r = static_cast<double>(live) / in.costs[i];
      if (best < 0 || r > best_ratio ||
          (r == best_ratio && in.ids[i] < in.ids[static_cast<size_t>(best)])) {
        best = static_cast<int64_t>(i);
        best_ratio = r;
      }
    }
    if (best < 0) throw std::invalid_argument("infeasible residual instance");
    GreedyPick pick;
    pick.set = in.ids[static_cast<size_t>(best)];
    for (uint32_t e : in.members[static_cast<size_t>(best)]) {
      if (covered[e]) continue;
      covered[e] = 1;
      pick.members.push_back(e);
    }
    pick.level = bt.level_of_ratio(static_cast<int64_t>(pick.members.size()),
                                   in.costs[static_cast<size_t>(best)]);
    std::sort(pick.members.begin(), pick.members.end());
    remaining -= pick.members.size();
    out.push_back(std::move(pick));
  }
  return out;
}

}  // namespace dsc
