#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsc/engine_sc.hpp"
#include "dsc/greedy.hpp"
#include "dsc/ledger.hpp"
#include "dsc/level_arith.hpp"
#include "dsc/report.hpp"
#include "dsc/view.hpp"

namespace dsc {

// Exact-counter set-cover twin: the same update rules as ScEngine, written
// with flat arrays, on-demand prefix sums instead of lazy counters, and a
// quadratic half-critical scan. Its visible trajectory must coincide
// step-for-step with the main engine running in exact-counter mode, and it
// must satisfy the whole invariant set without slack.
class ReferenceEngine {
 public:
  ReferenceEngine(SetSystem sys, const Params& params)
      : sys_(std::move(sys)),
        params_(params),
        bt_(params),
        ledger_(bt_.range(), /*keep_log=*/true) {
    const uint32_t m = static_cast<uint32_t>(sys_.sets.size());
    lcov_.assign(m, kNoLevel);
    cnt_.assign(m, std::vector<int64_t>(static_cast<size_t>(bt_.range()) + 1, 0));
    window_.resize(m);
    for (uint32_t s = 0; s < m; ++s)
      window_[s] = bt_.relevant_window(sys_.sets[s].cost);
    active_.assign(sys_.elements.size(), 0);
    level_.assign(sys_.elements.size(), kNoLevel);
    owner_.assign(sys_.elements.size(), kNone);
    initial_.assign(sys_.elements.size(), 0);
  }

  const StepReport& insert(uint32_t e) {
    if (active_[e]) throw std::invalid_argument("element already active");
    begin_step('+', e);
    active_[e] = 1;
    ++active_count_;

    uint32_t best = kNone;
    Level best_lcov = kNoLevel;
    for (uint32_t s : sys_.elements[e].sets)
      if (lcov_[s] > best_lcov) {
        best_lcov = lcov_[s];
        best = s;
      }
    if (best_lcov >= 0) {
      attach(e, best, /*initial=*/false);
    } else {
      uint32_t cheapest = sys_.elements[e].sets[0];
      for (uint32_t s : sys_.elements[e].sets)
        if (sys_.sets[s].cost < sys_.sets[cheapest].cost) cheapest = s;
      create_pair(cheapest, bt_.level_of_ratio(1, sys_.sets[cheapest].cost), 'i', 1);
      attach(e, cheapest, /*initial=*/true);
    }
    cur_.element_level_changes += 1;
    change_level(e, kNoLevel, level_[e]);
    return end_step();
  }

  const StepReport& erase(uint32_t e) {
    if (!active_[e]) throw std::invalid_argument("element not active");
    begin_step('-', e);
    const Level from = level_[e];
    detach(e, /*count_dirt=*/true);
    active_[e] = 0;
    --active_count_;
    cur_.element_level_changes += 1;
    change_level(e, from, kNoLevel);
    return end_step();
  }

  CoverSnapshot snapshot() const {
    CoverSnapshot out;
    for (uint32_t s = 0; s < lcov_.size(); ++s) {
      if (lcov_[s] == kNoLevel) continue;
      PairSnapshot ps;
      ps.set = s;
      ps.cost = sys_.sets[s].cost;
      ps.level = lcov_[s];
      for (uint32_t e = 0; e < owner_.size(); ++e)
        if (owner_[e] == s) ps.members.push_back(e);
      out.push_back(std::move(ps));
    }
    return out;
  }

  StateView view() const {
    StateView v;
    v.params = &params_;
    v.bt = &bt_;
    v.ledger = &ledger_;
    v.strict = true;
    v.active_items = active_count_;
    v.coverer_lcov = lcov_;
    v.coverer_cost.resize(lcov_.size());
    for (uint32_t s = 0; s < lcov_.size(); ++s)
      v.coverer_cost[s] = sys_.sets[s].cost;
    for (const PairSnapshot& ps : snapshot()) {
      PairView pv;
      pv.set = ps.set;
      pv.cost = ps.cost;
      pv.lcov = ps.level;
      for (uint32_t e : ps.members) pv.members.push_back({e, initial_[e] != 0});
      v.pairs.push_back(std::move(pv));
    }
    v.item_active.assign(active_.begin(), active_.end());
    v.item_level = level_;
    v.item_owner.resize(owner_.size());
    v.families.resize(owner_.size());
    for (uint32_t e = 0; e < owner_.size(); ++e) {
      v.item_owner[e] = owner_[e] == kNone ? -1 : static_cast<int64_t>(owner_[e]);
      if (active_[e])
        v.families[e] = sys_.elements[e].sets;
    }
    v.ctr_window = [this](uint32_t s) { return window_[s]; };
    v.ctr_exact = [this](uint32_t s, Level j) { return below(s, j); };
    v.ctr_approx = v.ctr_exact;
    v.fresh_pairs = last_.pairs_created;
    return v;
  }

  double cover_cost() const { return ledger_.total_cost(); }
  const StepReport& last_report() const { return last_; }
  const RunTotals& totals() const { return totals_; }
  const LevelLedger& ledger() const { return ledger_; }

 private:
  static constexpr uint32_t kNone = UINT32_MAX;

  void begin_step(char op, uint32_t a) {
    ++step_clock_;
    cur_ = StepReport{};
    cur_.step = step_clock_;
    cur_.op = op;
    cur_.arg_a = a;
  }

  const StepReport& end_step() {
    maybe_partial_reset();
    if (step_clock_ == next_global_reset_) {
      do_reset(ledger_.top(), true);
      next_global_reset_ =
          step_clock_ + static_cast<uint64_t>(std::max<int64_t>(active_count_, 1));
    }
    cur_.cover_cost = ledger_.total_cost();
    cur_.cover_sets = covering_count_;
    cur_.active_items = active_count_;
    if (dirty()) throw std::logic_error("reference: dirty after checkpoint");
    totals_.absorb(cur_);
    last_ = cur_;
    return last_;
  }

  int64_t below(uint32_t s, Level j) const {
    int64_t sum = 0;
    for (Level l = 0; l < j && l <= bt_.range(); ++l)
      sum += cnt_[s][static_cast<size_t>(l)];
    return sum;
  }

  void attach(uint32_t e, uint32_t s, bool initial) {
    owner_[e] = s;
    initial_[e] = initial ? 1 : 0;
    level_[e] = lcov_[s];
    ledger_.apply_arrival(level_[e]);
  }

  void detach(uint32_t e, bool count_dirt) {
    ledger_.apply_departure(level_[e], initial_[e] != 0, bt_, count_dirt);
    owner_[e] = kNone;
    level_[e] = kNoLevel;
  }

  void create_pair(uint32_t s, Level lev, char origin, int64_t size) {
    lcov_[s] = lev;
    ledger_.apply_set_enter(lev, sys_.sets[s].cost);
    ++covering_count_;
    cur_.recourse += 1;
    cur_.pairs_created.push_back({s, lev, size, origin});
  }

  void drop_pair(uint32_t s) {
    ledger_.apply_set_leave(lcov_[s], sys_.sets[s].cost);
    lcov_[s] = kNoLevel;
    --covering_count_;
    cur_.recourse += 1;
  }

  // Exact ChangeLevel: update every relevant counter of the sets containing
  // e, then scan them for the highest PD level (lowest set id on ties).
  void change_level(uint32_t e, Level from, Level to) {
    for (uint32_t s : sys_.elements[e].sets) {
      if (from != kNoLevel) cnt_[s][static_cast<size_t>(from)] -= 1;
      if (to != kNoLevel) cnt_[s][static_cast<size_t>(to)] += 1;
    }
    if (in_reset_) return;
    bool found = false;
    uint32_t best_set = 0;
    Level best_j = 0;
    for (uint32_t s : sys_.elements[e].sets) {
      const auto [j_min, j_max] = window_[s];
      const double cost = sys_.sets[s].cost;
      for (Level j = j_max; j >= j_min; --j) {
        if (j <= lcov_[s]) break;
        if (ge_tol(static_cast<double>(below(s, j)), cost * bt_.pow(j + 1))) {
          if (!found || j > best_j || (j == best_j && s < best_set)) {
            found = true;
            best_set = s;
            best_j = j;
          }
          break;
        }
      }
    }
    if (found) rise(best_set, best_j);
  }

  void rise(uint32_t s, Level j) {
    const Level target = j + 1;
    std::vector<uint32_t> members;
    for (uint32_t e : sys_.sets[s].elements)
      if (active_[e] && level_[e] < target) members.push_back(e);
    std::sort(members.begin(), members.end());
    const double cost = sys_.sets[s].cost;
    if (lt_tol(static_cast<double>(members.size()), cost * bt_.pow(target))) {
      cur_.stale_pd_skips += 1;
      return;
    }
    if (rise_depth_ == 0)
      cur_.rise_roots += 1;
    else
      cur_.nested_rises += 1;
    cur_.rises += 1;
    ++rise_depth_;
    if (lcov_[s] == kNoLevel) {
      create_pair(s, target, 'r', static_cast<int64_t>(members.size()));
    } else {
      ledger_.apply_set_leave(lcov_[s], cost);
      lcov_[s] = target;
      ledger_.apply_set_enter(target, cost);
      cur_.pairs_created.push_back(
          {s, target, static_cast<int64_t>(members.size()), 'r'});
    }
    for (uint32_t e : members) {
      if (level_[e] >= target) continue;
      const Level from = level_[e];
      detach(e, /*count_dirt=*/true);
      attach(e, s, /*initial=*/true);
      cur_.element_level_changes += 1;
      change_level(e, from, target);
    }
    --rise_depth_;
  }

  bool dirty() const {
    if (covering_count_ == 0) return false;
    return ledger_.total_dirt() >=
           (params_.eps / params_.beta) * ledger_.total_cost();
  }

  void maybe_partial_reset() {
    if (!dirty()) return;
    Level b = kNoLevel;
    for (Level j = 0; j <= ledger_.top() && b == kNoLevel; ++j)
      if (ledger_.sets(j) > 0) b = j;
    if (b == kNoLevel) return;

    const Level span = static_cast<Level>(
        std::ceil(4.0 * std::log(static_cast<double>(params_.n_cap)) /
                  std::log(params_.beta)));
    const Level u = std::min<Level>(b + std::max<Level>(span, 1), ledger_.top());
    double sub_b = 0.0;
    for (Level j = 0; j < b; ++j) sub_b += ledger_.dirt(j);
    auto deff = [&](Level j) {
      return ledger_.dirt(j) + (j == b ? sub_b : 0.0);
    };
    const double half = 0.5 * params_.eps / params_.beta;

    std::optional<Level> crit;
    for (Level i = u; i >= b && !crit; --i) {
      if (deff(i) <= 0.0 && ledger_.sets(i) == 0) continue;
      if (deff(i) < half * ledger_.cost(i)) continue;
      bool ok = true;
      double dsum = 0.0, csum = 0.0;
      for (Level j = i; j >= b; --j) {
        dsum += deff(j);
        csum += ledger_.cost(j);
        if (dsum < half * csum) {
          ok = false;
          break;
        }
      }
      if (ok) crit = i;
    }
    if (!crit)
      throw std::logic_error("reference: dirty without half-critical level");
    do_reset(*crit, false);
  }

  void do_reset(Level cap, bool global) {
    in_reset_ = true;
    std::vector<uint32_t> u_items;
    for (uint32_t e = 0; e < active_.size(); ++e)
      if (active_[e] && level_[e] <= cap) u_items.push_back(e);
    std::vector<Level> old_level(u_items.size());
    for (size_t i = 0; i < u_items.size(); ++i) old_level[i] = level_[u_items[i]];

    std::vector<char> is_cand(lcov_.size(), 0);
    for (uint32_t e : u_items)
      for (uint32_t s : sys_.elements[e].sets)
        if (lcov_[s] <= cap) is_cand[s] = 1;

    std::vector<uint32_t> evict;
    int64_t f_size = 0;
    for (uint32_t s = 0; s < lcov_.size(); ++s) {
      if (lcov_[s] >= 0 && lcov_[s] <= cap) evict.push_back(s);
      if (is_cand[s]) ++f_size;
    }
    for (uint32_t s : evict)
      if (!is_cand[s]) ++f_size;  // idle, no orphan members

    for (uint32_t e : u_items) detach(e, /*count_dirt=*/false);
    for (uint32_t s : evict) drop_pair(s);

    ledger_.reset_dirt_up_to(cap);

    GreedyInput gin;
    gin.item_id_bound = static_cast<uint32_t>(active_.size());
    gin.universe_size = u_items.size();
    for (uint32_t s = 0; s < lcov_.size(); ++s) {
      if (!is_cand[s]) continue;
      gin.ids.push_back(s);
      gin.costs.push_back(sys_.sets[s].cost);
      std::vector<uint32_t> mem;
      for (uint32_t e : sys_.sets[s].elements)
        if (active_[e] && owner_[e] == kNone && level_[e] == kNoLevel) {
          // only items that entered this reset
          mem.push_back(e);
        }
      gin.members.push_back(std::move(mem));
    }
    if (!u_items.empty()) {
      for (const GreedyPick& pick : greedy_cover_naive(bt_, gin)) {
        if (!global && pick.level > cap + 1)
          throw std::logic_error("reference: reset pair above i_crit + 1");
        create_pair(pick.set, pick.level, 'g',
                    static_cast<int64_t>(pick.members.size()));
        for (uint32_t e : pick.members) attach(e, pick.set, true);
      }
    }
    for (size_t i = 0; i < u_items.size(); ++i)
      change_level(u_items[i], old_level[i], level_[u_items[i]]);
    cur_.element_level_changes += static_cast<int64_t>(u_items.size());
    in_reset_ = false;
    cur_.resets.push_back(
        {global, cap, static_cast<int64_t>(u_items.size()), f_size});
  }

  SetSystem sys_;
  Params params_;
  BetaTable bt_;
  LevelLedger ledger_;

  std::vector<Level> lcov_;
  std::vector<std::vector<int64_t>> cnt_;
  std::vector<std::pair<Level, Level>> window_;
  std::vector<char> active_;
  std::vector<Level> level_;
  std::vector<uint32_t> owner_;
  std::vector<char> initial_;

  int64_t active_count_ = 0;
  int64_t covering_count_ = 0;
  uint64_t step_clock_ = 0;
  uint64_t next_global_reset_ = 1;
  bool in_reset_ = false;
  int32_t rise_depth_ = 0;

  StepReport cur_;
  StepReport last_;
  RunTotals totals_;
};

}  // namespace dsc
