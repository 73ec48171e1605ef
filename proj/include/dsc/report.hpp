#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsc/level_arith.hpp"

namespace dsc {

struct ResetInfo {
  bool global = false;
  Level i_crit = 0;  // level cap of the reset (top level for global)
  int64_t u_size = 0;
  int64_t f_size = 0;
};

struct PairCreated {
  uint32_t set = 0;
  Level level = 0;
  int64_t size = 0;
  char origin = 'i';  // 'i' insert, 'r' local rise, 'g' greedy (reset)
};

// Per-update instrumentation; one of these per public engine op.
struct StepReport {
  uint64_t step = 0;
  char op = '+';
  uint32_t arg_a = 0, arg_b = 0;  // element, or edge endpoints
  int64_t element_level_changes = 0;
  int64_t recourse = 0;  // sets joining or leaving the cover
  int32_t rises = 0;
  int32_t rise_roots = 0;
  int32_t nested_rises = 0;
  int32_t stale_pd_skips = 0;
  int32_t inv3_moves = 0;
  std::vector<ResetInfo> resets;
  std::vector<PairCreated> pairs_created;
  double cover_cost = 0.0;
  int64_t cover_sets = 0;
  int64_t active_items = 0;
  uint64_t refreshed_entries = 0;  // cumulative-counter entries this step
};

struct RunTotals {
  uint64_t ops = 0;
  int64_t element_level_changes = 0;
  int64_t recourse = 0;
  int64_t rises = 0;
  int64_t rise_roots = 0;
  int64_t nested_rises = 0;
  int64_t stale_pd_skips = 0;
  int64_t partial_resets = 0;
  int64_t global_resets = 0;
  int64_t max_cover_sets = 0;
  Level peak_level = kNoLevel;

  void absorb(const StepReport& s) {
    ops += 1;
    element_level_changes += s.element_level_changes;
    recourse += s.recourse;
    rises += s.rises;
    rise_roots += s.rise_roots;
    nested_rises += s.nested_rises;
    stale_pd_skips += s.stale_pd_skips;
    for (const auto& r : s.resets)
      (r.global ? global_resets : partial_resets) += 1;
    if (s.cover_sets > max_cover_sets) max_cover_sets = s.cover_sets;
    for (const auto& p : s.pairs_created)
      if (p.level > peak_level) peak_level = p.level;
  }
};

// One pair of a cover snapshot; members ascend, pairs sorted by set id.
struct PairSnapshot {
  uint32_t set = 0;
  double cost = 0.0;
  Level level = 0;
  std::vector<uint32_t> members;

  bool operator==(const PairSnapshot& o) const {
    return set == o.set && level == o.level && members == o.members;
  }
};

using CoverSnapshot = std::vector<PairSnapshot>;

}  // namespace dsc
