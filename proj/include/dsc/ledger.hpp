#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dsc/level_arith.hpp"

namespace dsc {

// One departure event, kept so the per-level dirt/departure counters can be
// reconstructed independently of the incremental bookkeeping. Reset events
// appear inline as boundaries (level_cap = highest level whose counters were
// zeroed).
struct DepartureEvent {
  enum Kind : uint8_t { kDeparture, kResetBoundary };
  Kind kind;
  Level level;   // departure level, or the reset's level cap
  bool initial;  // departure only
};

// Per-level bookkeeping: dirt D_j, departures E_j, covering cost C_j, covered
// elements L_j, covering sets S_j, plus global dirt/cost kept in lockstep.
class LevelLedger {
 public:
  LevelLedger(Level top, bool keep_log)
      : top_(top), keep_log_(keep_log), dirt_(top + 1, 0.0),
        departures_(top + 1, 0), cost_(top + 1, 0.0), covered_(top + 1, 0),
        sets_(top + 1, 0) {}

  Level top() const { return top_; }
  bool logging_enabled() const { return keep_log_; }
  double total_dirt() const { return total_dirt_; }
  double total_cost() const { return total_cost_; }
  double dirt(Level j) const { return dirt_.at(idx(j)); }
  int64_t departures(Level j) const { return departures_.at(idx(j)); }
  double cost(Level j) const { return cost_.at(idx(j)); }
  int64_t covered(Level j) const { return covered_.at(idx(j)); }
  int64_t sets(Level j) const { return sets_.at(idx(j)); }
  const std::vector<DepartureEvent>& log() const { return log_; }

  // Element leaves a pair at `j`. Initial members add dirt 1/beta^j and one
  // departure; later joiners only shrink L_j. `count_dirt` is false while a
  // reset tears pairs down (those counters are zeroed by the reset anyway).
  void apply_departure(Level j, bool initial, const BetaTable& bt,
                       bool count_dirt = true) {
    bump_covered(j, -1);
    if (!count_dirt) return;
    // Non-initial departures are logged too: the checker reconstructs both
    // dirt variants (initial-only, which drives resets, and all-departures).
    if (keep_log_) log_.push_back({DepartureEvent::kDeparture, j, initial});
    if (initial) {
      const double d = 1.0 / bt.pow(j);
      dirt_[idx(j)] += d;
      total_dirt_ += d;
      departures_[idx(j)] += 1;
    }
  }

  void apply_arrival(Level j) { bump_covered(j, +1); }

  void apply_set_enter(Level j, double c) {
    cost_[idx(j)] += c;
    total_cost_ += c;
    sets_[idx(j)] += 1;
  }

  void apply_set_leave(Level j, double c) {
    cost_[idx(j)] -= c;
    total_cost_ -= c;
    sets_[idx(j)] -= 1;
    if (sets_[idx(j)] < 0) throw std::logic_error("ledger: negative set count");
    if (cost_[idx(j)] < -1e-9) throw std::logic_error("ledger: negative cost");
    if (cost_[idx(j)] < 0) cost_[idx(j)] = 0.0;
    if (total_cost_ < 0) total_cost_ = 0.0;
  }

  // Zero dirt and departure counters at every level <= cap.
  void reset_dirt_up_to(Level cap) {
    if (cap > top_) cap = top_;
    for (Level j = 0; j <= cap; ++j) {
      total_dirt_ -= dirt_[idx(j)];
      dirt_[idx(j)] = 0.0;
      departures_[idx(j)] = 0;
    }
    if (total_dirt_ < 1e-12) total_dirt_ = 0.0;
    if (keep_log_)
      log_.push_back({DepartureEvent::kResetBoundary, cap, false});
  }

 private:
  size_t idx(Level j) const {
    if (j < 0 || j > top_)
      throw std::logic_error("ledger: level out of range");
    return static_cast<size_t>(j);
  }

  void bump_covered(Level j, int64_t d) {
    covered_[idx(j)] += d;
    if (covered_[idx(j)] < 0)
      throw std::logic_error("ledger: negative covered count");
  }

  Level top_;
  bool keep_log_;
  double total_dirt_ = 0.0;
  double total_cost_ = 0.0;
  std::vector<double> dirt_;
  std::vector<int64_t> departures_;
  std::vector<double> cost_;
  std::vector<int64_t> covered_;
  std::vector<int64_t> sets_;
  std::vector<DepartureEvent> log_;
};

}  // namespace dsc
