#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsc/level_arith.hpp"

namespace dsc {

// Zones of window indices sharing one refresh period: levels in the zone with
// ordinal i are refreshed every 2^{i-1} increments of the per-set change
// counter, driven by the bits of that counter like a binary counter.
struct ZoneRange {
  int32_t lo = 0, hi = 0;  // inclusive window indices
  uint32_t ordinal = 1;    // 1-based; bit (ordinal-1) of C_S triggers it
};

class ZonePartition {
 public:
  // `base_level` is the absolute level of window index 0 (j_min). Ordinals
  // are chosen so that the refresh period 2^{i-1} never exceeds
  // eps * beta^{absolute level}, which is exactly the staleness budget.
  ZonePartition(int32_t window_size, double eps, Level base_level) {
    if (window_size < 1) throw std::invalid_argument("empty window");
    const double beta = 1.0 + eps;
    // effective index; shifting by min(base,0) keeps the period bound valid
    // for the j_min = -1 windows of near-unit-cost sets.
    const int32_t shift = base_level < 0 ? base_level : 0;
    double p = std::pow(beta, static_cast<double>(shift));
    std::vector<uint32_t> ord(window_size);
    for (int32_t r = 0; r < window_size; ++r) {
      const double y = eps * p;
      ord[r] = y < 1.0 ? 1u : 1u + static_cast<uint32_t>(std::ilogb(y));
      p *= beta;
    }
    for (int32_t r = 0; r < window_size; ++r) {
      if (!ranges_.empty() && ranges_.back().ordinal == ord[r]) {
        ranges_.back().hi = r;
      } else {
        ranges_.push_back({r, r, ord[r]});
      }
    }
    max_ordinal_ = ranges_.back().ordinal;
    prefix_end_.assign(max_ordinal_ + 1, -1);
    for (const auto& z : ranges_)
      for (uint32_t q = z.ordinal; q <= max_ordinal_; ++q)
        prefix_end_[q] = std::max(prefix_end_[q], z.hi);
  }

  const std::vector<ZoneRange>& ranges() const { return ranges_; }

  // Highest window index refreshed when bits 1..q of the change counter
  // flip; -1 means bookkeeping only.
  int32_t prefix_end(uint32_t q) const {
    if (q == 0) return -1;
    if (q > max_ordinal_) q = max_ordinal_;
    return prefix_end_[q];
  }

 private:
  std::vector<ZoneRange> ranges_;
  std::vector<int32_t> prefix_end_;
  uint32_t max_ordinal_ = 1;
};

// Spec'd standalone form: window indices are relative levels starting at 0.
inline std::vector<ZoneRange> zone_partition(int32_t window_size, double eps) {
  return ZonePartition(window_size, eps, 0).ranges();
}

// A refreshed cumulative prefix produced by one change record; feeds the
// PD candidate scan of the same update step.
struct RefreshEvent {
  uint32_t set;
  int32_t prefix_end;  // highest refreshed window index
};

// Per-set occupancy counts. For each registered set: exact per-level buckets
// N^j(S) over the relevant window (plus an underflow bucket for levels below
// j_min and an overflow bucket above j_max), and lazily refreshed cumulative
// counts cum[r] ~ N_{j_min+r}(S) = #{members below level j_min+r}.
class CounterBank {
 public:
  CounterBank(const BetaTable& bt, double eps, bool exact_mode)
      : bt_(&bt), eps_(eps), exact_mode_(exact_mode) {}

  static constexpr uint32_t kNoCell = UINT32_MAX;

  void register_set(uint32_t set, double cost) {
    if (set != ctrs_.size()) throw std::logic_error("sets register in order");
    auto [j_min, j_max] = bt_->relevant_window(cost);
    SetCtr c;
    c.j_min = j_min;
    c.j_max = j_max;
    const int32_t w = j_max - j_min + 1;
    auto key = std::make_pair(j_min, w);
    auto it = partitions_.find(key);
    if (it == partitions_.end())
      it = partitions_
               .emplace(key, std::make_unique<ZonePartition>(w, eps_, j_min))
               .first;
    c.zones = it->second.get();
    c.buckets.resize(static_cast<size_t>(w) + 2);
    c.cum.assign(static_cast<size_t>(w), 0);
    ctrs_.push_back(std::move(c));
  }

  uint32_t alloc_cell() {
    if (!free_cells_.empty()) {
      uint32_t c = free_cells_.back();
      free_cells_.pop_back();
      return c;
    }
    cells_.push_back(0);
    return static_cast<uint32_t>(cells_.size() - 1);
  }

  void free_cell(uint32_t cell) { free_cells_.push_back(cell); }

  // Element tracked by `cell` moved (or appeared/disappeared) for `set`.
  // Updates the exact buckets, bumps C_S, and refreshes the cumulative
  // prefix dictated by the flipped bits. Returns the refreshed prefix end.
  std::optional<int32_t> record_change(uint32_t set, std::optional<Level> from,
                                       std::optional<Level> to, uint32_t item,
                                       uint32_t cell) {
    SetCtr& c = ctrs_.at(set);
    if (from) bucket_erase(c, bucket_index(c, *from), cell);
    if (to) bucket_push(c, bucket_index(c, *to), item, cell);
    const uint64_t before = c.change_counter++;
    uint32_t q = static_cast<uint32_t>(std::countr_one(before)) + 1;
    if (exact_mode_) q = UINT32_MAX;
    const int32_t end = c.zones->prefix_end(q);
    if (end < 0) return std::nullopt;
    refresh_prefix(c, end);
    return end;
  }

  // Full-window refresh regardless of the schedule (used where a prefix is
  // forced, e.g. a dominator losing its covered neighbour).
  void force_refresh(uint32_t set) {
    SetCtr& c = ctrs_.at(set);
    refresh_prefix(c, static_cast<int32_t>(c.cum.size()) - 1);
  }

  // j-PD test against the lazily maintained count: j > l_cov and
  // N~_j(S) >= cost * beta^{j+1}.
  bool is_j_pd(uint32_t set, Level j, Level l_cov, double cost) const {
    const SetCtr& c = ctrs_.at(set);
    if (j <= l_cov || j < c.j_min || j > c.j_max) return false;
    const int64_t approx = c.cum[static_cast<size_t>(j - c.j_min)];
    return ge_tol(static_cast<double>(approx), cost * bt_->pow(j + 1));
  }

  // Exact N_j(S): members strictly below level j, recomputed from buckets.
  int64_t exact_below(uint32_t set, Level j) const {
    const SetCtr& c = ctrs_.at(set);
    int64_t sum = 0;
    const int32_t cap = bucket_index(c, j);  // buckets [0, cap) hold < j
    for (int32_t b = 0; b < cap; ++b) sum += ssize(c.buckets[b]);
    return sum;
  }

  // Members with level < j, ascending item id (rise membership).
  std::vector<uint32_t> members_below(uint32_t set, Level j) const {
    const SetCtr& c = ctrs_.at(set);
    std::vector<uint32_t> out;
    const int32_t cap = bucket_index(c, j);
    for (int32_t b = 0; b < cap; ++b)
      for (const BEntry& e : c.buckets[b]) out.push_back(e.item);
    std::sort(out.begin(), out.end());
    return out;
  }

  int64_t approx_count(uint32_t set, Level j) const {
    const SetCtr& c = ctrs_.at(set);
    if (j < c.j_min || j > c.j_max) throw std::logic_error("cum out of window");
    return c.cum[static_cast<size_t>(j - c.j_min)];
  }

  std::pair<Level, Level> window(uint32_t set) const {
    const SetCtr& c = ctrs_.at(set);
    return {c.j_min, c.j_max};
  }

  uint64_t change_counter(uint32_t set) const {
    return ctrs_.at(set).change_counter;
  }

  uint64_t total_refreshed_entries() const { return total_refreshed_; }
  bool exact_mode() const { return exact_mode_; }

  // Fault-injection hook for checker tests; not used by the engine.
  void poke_cumulative_entry(uint32_t set, Level j, int64_t value) {
    SetCtr& c = ctrs_.at(set);
    c.cum.at(static_cast<size_t>(j - c.j_min)) = value;
  }

 private:
  struct BEntry {
    uint32_t item;
    uint32_t cell;
  };
  using Bucket = std::vector<BEntry>;

  struct SetCtr {
    Level j_min = 0, j_max = 0;
    const ZonePartition* zones = nullptr;
    uint64_t change_counter = 0;
    // buckets[0]: levels < j_min; buckets[1..w]: exact level j_min+b-1;
    // buckets[w+1]: levels > j_max (never feeds cum or PD tests).
    std::vector<Bucket> buckets;
    std::vector<int64_t> cum;
  };

  static int64_t ssize(const Bucket& b) {
    return static_cast<int64_t>(b.size());
  }

  static int32_t bucket_index(const SetCtr& c, Level l) {
    if (l < c.j_min) return 0;
    if (l <= c.j_max) return l - c.j_min + 1;
    return static_cast<int32_t>(c.buckets.size()) - 1;
  }

  void bucket_push(SetCtr& c, int32_t b, uint32_t item, uint32_t cell) {
    Bucket& bk = c.buckets[static_cast<size_t>(b)];
    cells_[cell] = static_cast<uint32_t>(bk.size());
    bk.push_back({item, cell});
  }

  void bucket_erase(SetCtr& c, int32_t b, uint32_t cell) {
    Bucket& bk = c.buckets[static_cast<size_t>(b)];
    const uint32_t pos = cells_[cell];
    if (pos >= bk.size() || bk[pos].cell != cell)
      throw std::logic_error("counter bucket underflow: ownership bug");
    bk[pos] = bk.back();
    bk.pop_back();
    if (pos < bk.size()) cells_[bk[pos].cell] = pos;
  }

  void refresh_prefix(SetCtr& c, int32_t end) {
    if (end < 0) return;
    c.cum[0] = ssize(c.buckets[0]);
    for (int32_t r = 1; r <= end; ++r)
      c.cum[static_cast<size_t>(r)] =
          c.cum[static_cast<size_t>(r - 1)] + ssize(c.buckets[static_cast<size_t>(r)]);
    total_refreshed_ += static_cast<uint64_t>(end) + 1;
  }

  const BetaTable* bt_;
  double eps_;
  bool exact_mode_;
  uint64_t total_refreshed_ = 0;
  std::vector<SetCtr> ctrs_;
  std::vector<uint32_t> cells_;
  std::vector<uint32_t> free_cells_;
  std::map<std::pair<Level, int32_t>, std::unique_ptr<ZonePartition>>
      partitions_;
};

}  // namespace dsc
