#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsc/counters.hpp"
#include "dsc/greedy.hpp"
#include "dsc/ledger.hpp"
#include "dsc/level_arith.hpp"
#include "dsc/report.hpp"
#include "dsc/view.hpp"

namespace dsc {

inline constexpr uint32_t kNone = UINT32_MAX;

// Shared machinery of the dynamic cover: extended solution state, level
// registries, dirt ledger, lazy counters, local rises, dirtiness detection,
// half-critical search, and partial/global resets. The Provider supplies the
// coverer family of an item (static set lists for set cover, the closed
// neighbourhood for dominating set) together with the counter cell tracking
// the item inside each coverer.
template <class Provider>
class EngineCore {
 public:
  EngineCore(const Params& params, bool exact_counters, bool keep_log)
      : params_(params),
        bt_(params),
        bank_(bt_, params.eps, exact_counters),
        ledger_(bt_.range(), keep_log),
        sets_at_level_(static_cast<size_t>(bt_.range()) + 1),
        items_at_level_(static_cast<size_t>(bt_.range()) + 1) {}

  void register_coverer(double cost) {
    bank_.register_set(static_cast<uint32_t>(coverers_.size()), cost);
    coverers_.push_back({});
  }

  void register_items(uint32_t count) { items_.assign(count, {}); }
  void attach_provider(const Provider* p) { prov_ = p; }
  void set_max_rise_roots(int32_t m) { max_rise_roots_ = m; }
  void set_setup_mode(bool s) { setup_ = s; }

  const Params& params() const { return params_; }
  const BetaTable& beta_table() const { return bt_; }
  const LevelLedger& ledger() const { return ledger_; }
  CounterBank& bank() { return bank_; }
  const CounterBank& bank() const { return bank_; }
  const RunTotals& totals() const { return totals_; }
  uint64_t step_clock() const { return step_clock_; }
  int64_t active_items() const { return active_count_; }
  int64_t covering_sets() const { return covering_count_; }
  const StepReport& last_report() const { return last_; }

  bool item_active(uint32_t e) const { return items_.at(e).active; }
  Level item_level(uint32_t e) const { return items_.at(e).level; }
  uint32_t item_owner(uint32_t e) const { return items_.at(e).owner; }
  Level coverer_level(uint32_t s) const { return coverers_.at(s).lcov; }
  uint32_t coverer_count() const {
    return static_cast<uint32_t>(coverers_.size());
  }
  uint32_t item_count() const { return static_cast<uint32_t>(items_.size()); }

  StepReport& current() { return cur_; }

  void begin_step(char op, uint32_t a, uint32_t b) {
    ++step_clock_;
    cur_ = StepReport{};
    cur_.step = step_clock_;
    cur_.op = op;
    cur_.arg_a = a;
    cur_.arg_b = b;
    refresh_baseline_ = bank_.total_refreshed_entries();
  }

  const StepReport& end_step() {
    maybe_partial_reset();
    maybe_global_reset();
    cur_.cover_cost = ledger_.total_cost();
    cur_.cover_sets = covering_count_;
    cur_.active_items = active_count_;
    cur_.refreshed_entries = bank_.total_refreshed_entries() - refresh_baseline_;
    if (cur_.rise_roots > max_rise_roots_)
      throw std::logic_error("local rise roots exceeded per-step bound");
    if (dirty())
      throw std::logic_error("system still dirty after reset checkpoint");
    totals_.absorb(cur_);
    last_ = cur_;
    return last_;
  }

  void set_active(uint32_t e, bool a) {
    Item& it = items_.at(e);
    if (it.active == a) throw std::invalid_argument("activation state clash");
    it.active = a;
    active_count_ += a ? 1 : -1;
    if (active_count_ > params_.n_cap)
      throw std::invalid_argument("active element cap exceeded");
  }

  // --- solution-state primitives -------------------------------------------

  void pair_create(uint32_t s, Level lev, char origin, int64_t planned_size) {
    Coverer& c = coverers_.at(s);
    if (c.lcov != kNoLevel) throw std::logic_error("pair_create on coverer");
    c.lcov = lev;
    registry_add(sets_at_level_, lev, s, c.reg_pos, set_reg_of_);
    ledger_.apply_set_enter(lev, prov_->cost(s));
    ++covering_count_;
    if (!setup_) {
      cur_.recourse += 1;
      cur_.pairs_created.push_back({s, lev, planned_size, origin});
    }
  }

  void pair_dissolve(uint32_t s) {
    Coverer& c = coverers_.at(s);
    if (c.lcov == kNoLevel) throw std::logic_error("pair_dissolve on idle id");
    if (!c.members.empty()) throw std::logic_error("dissolving nonempty pair");
    ledger_.apply_set_leave(c.lcov, prov_->cost(s));
    registry_remove(sets_at_level_, c.lcov, c.reg_pos, set_reg_of_);
    c.lcov = kNoLevel;
    --covering_count_;
    if (!setup_) cur_.recourse += 1;
  }

  void pair_move_level(uint32_t s, Level lev) {
    Coverer& c = coverers_.at(s);
    ledger_.apply_set_leave(c.lcov, prov_->cost(s));
    registry_remove(sets_at_level_, c.lcov, c.reg_pos, set_reg_of_);
    c.lcov = lev;
    registry_add(sets_at_level_, lev, s, c.reg_pos, set_reg_of_);
    ledger_.apply_set_enter(lev, prov_->cost(s));
  }

  void member_add(uint32_t s, uint32_t e, bool initial) {
    Coverer& c = coverers_.at(s);
    Item& it = items_.at(e);
    if (it.owner != kNone) throw std::logic_error("item already covered");
    it.owner = s;
    it.pos_in_members = static_cast<uint32_t>(c.members.size());
    c.members.push_back({e, initial});
    it.level = c.lcov;
    registry_add(items_at_level_, it.level, e, it.reg_pos, item_reg_of_);
    ledger_.apply_arrival(it.level);
  }

  void member_remove(uint32_t e, bool count_dirt) {
    Item& it = items_.at(e);
    if (it.owner == kNone) throw std::logic_error("item has no owner");
    Coverer& c = coverers_.at(it.owner);
    const uint32_t pos = it.pos_in_members;
    const bool initial = c.members.at(pos).initial;
    c.members[pos] = c.members.back();
    c.members.pop_back();
    if (pos < c.members.size())
      items_.at(c.members[pos].item).pos_in_members = pos;
    registry_remove(items_at_level_, it.level, it.reg_pos, item_reg_of_);
    ledger_.apply_departure(it.level, initial, bt_, count_dirt);
    it.owner = kNone;
    it.level = kNoLevel;
  }

  // --- the change-level cascade -------------------------------------------

  // Apply the counter bookkeeping for one item transition and, outside of
  // resets, run the PD candidate scan over the entries this step refreshed;
  // a surviving candidate triggers a local rise (which cascades recursively).
  void cascade(uint32_t e, std::optional<Level> from, std::optional<Level> to,
               const std::vector<RefreshEvent>* extra = nullptr,
               bool allow_rise = true) {
    std::vector<RefreshEvent> events;
    if (extra) events = *extra;
    prov_->for_each_coverer_of(e, [&](uint32_t s, uint32_t cell) {
      auto end = bank_.record_change(s, from, to, e, cell);
      if (end) events.push_back({s, *end});
    });
    if (in_reset_ || setup_ || !allow_rise) return;
    evaluate(events);
  }

  void evaluate(const std::vector<RefreshEvent>& events) {
    bool found = false;
    uint32_t best_set = 0;
    Level best_j = 0;
    for (const RefreshEvent& ev : events) {
      const Level lcov = coverers_[ev.set].lcov;
      const double cost = prov_->cost(ev.set);
      const auto [j_min, j_max] = bank_.window(ev.set);
      (void)j_max;
      for (Level j = j_min + ev.prefix_end; j >= j_min; --j) {
        if (j <= lcov) break;
        if (bank_.is_j_pd(ev.set, j, lcov, cost)) {
          if (!found || j > best_j || (j == best_j && ev.set < best_set)) {
            found = true;
            best_set = ev.set;
            best_j = j;
          }
          break;  // highest PD level of this set found
        }
      }
    }
    if (found) local_rise(best_set, best_j);
  }

  // Rebuild Cov(S) at level j+1 from every member below j+1. Detection went
  // through the lazy counters; the membership itself is enumerated exactly,
  // and the rise is dropped if the exact ratio no longer clears beta^{j+1}.
  void local_rise(uint32_t s, Level j) {
    const double cost = prov_->cost(s);
    std::vector<uint32_t> members = bank_.members_below(s, j + 1);
    if (lt_tol(static_cast<double>(members.size()), cost * bt_.pow(j + 1))) {
      cur_.stale_pd_skips += 1;
      return;
    }
    if (rise_depth_ == 0)
      cur_.rise_roots += 1;
    else
      cur_.nested_rises += 1;
    cur_.rises += 1;
    ++rise_depth_;
    const Level target = j + 1;
    if (coverers_[s].lcov == kNoLevel) {
      pair_create(s, target, 'r', static_cast<int64_t>(members.size()));
    } else {
      pair_move_level(s, target);
      cur_.pairs_created.push_back(
          {s, target, static_cast<int64_t>(members.size()), 'r'});
    }
    for (uint32_t e : members) {
      if (items_[e].level >= target) continue;  // lifted by a nested rise
      const Level from = items_[e].level;
      member_remove(e, /*count_dirt=*/true);
      member_add(s, e, /*initial=*/true);
      cur_.element_level_changes += 1;
      cascade(e, from, target);
    }
    --rise_depth_;
  }

  // --- dirtiness and resets -------------------------------------------------

  bool dirty() const {
    if (covering_count_ == 0) return false;
    return ledger_.total_dirt() >=
           (params_.eps / params_.beta) * ledger_.total_cost();
  }

  std::optional<Level> lowest_covering_level() const {
    for (Level j = 0; j <= ledger_.top(); ++j)
      if (ledger_.sets(j) > 0) return j;
    return std::nullopt;
  }

  // Highest half-critical level in [b, b + 4 log_beta n_cap]. Dirt sitting
  // strictly below b (a level can keep dirt after its sets rose away) is
  // credited to level b for both the candidacy test and the prefix sums.
  std::optional<Level> find_highest_half_critical(Level b) const {
    const double half = 0.5 * params_.eps / params_.beta;
    const Level top = ledger_.top();
    const Level span = static_cast<Level>(
        std::ceil(4.0 * std::log(static_cast<double>(params_.n_cap)) /
                  std::log(params_.beta)));
    const Level u = std::min<Level>(b + std::max<Level>(span, 1), top);
    double sub_b = 0.0;
    for (Level j = 0; j < b; ++j) sub_b += ledger_.dirt(j);
    auto deff = [&](Level j) {
      return ledger_.dirt(j) + (j == b ? sub_b : 0.0);
    };

    std::vector<Level> cands;
    for (Level i = b; i <= u; ++i) {
      const double d = deff(i);
      if (d <= 0.0 && ledger_.sets(i) == 0) continue;  // nothing there
      if (d >= half * ledger_.cost(i)) cands.push_back(i);
    }

    struct DirtyRange {
      Level lo, hi;
      double dsum, csum;  // over levels lo+1 .. hi
    };
    std::vector<DirtyRange> ranges;
    std::optional<Level> best;
    for (Level i : cands) {
      double dsum = deff(i);
      double csum = ledger_.cost(i);
      Level j = i - 1;
      bool crit = true;
      while (j >= b) {
        bool skipped = false;
        for (size_t r = 0; r < ranges.size(); ++r) {
          if (ranges[r].hi == j) {
            dsum += ranges[r].dsum;
            csum += ranges[r].csum;
            j = ranges[r].lo;
            ranges.erase(ranges.begin() + static_cast<long>(r));
            skipped = true;
            break;
          }
        }
        if (skipped) continue;
        const double dprev = dsum, cprev = csum;
        dsum += deff(j);
        csum += ledger_.cost(j);
        if (dsum < half * csum) {
          ranges.push_back({j, i, dprev, cprev});
          crit = false;
          break;
        }
        --j;
      }
      if (crit) {
        best = i;
        ranges.push_back({static_cast<Level>(b - 1), i, dsum, csum});
      }
    }
    return best;
  }

  void maybe_partial_reset() {
    if (!dirty()) return;
    const auto b = lowest_covering_level();
    if (!b) return;
    const auto i_crit = find_highest_half_critical(*b);
    if (!i_crit)
      throw std::logic_error(
          "dirty system without a half-critical level in scan window");
    do_reset(*i_crit, /*global=*/false);
  }

  void maybe_global_reset() {
    if (step_clock_ != next_global_reset_) return;
    do_reset(ledger_.top(), /*global=*/true);
    next_global_reset_ = step_clock_ +
                         static_cast<uint64_t>(std::max<int64_t>(active_count_, 1));
  }

  // Evict every covering set at a level <= cap, zero the dirt ledger up to
  // cap, and re-cover the orphaned items with the static greedy over the
  // candidate family. Every re-covered item counts as a level change.
  void do_reset(Level cap, bool global) {
    in_reset_ = true;

    std::vector<uint32_t> u_items;
    for (Level j = 0; j <= cap; ++j)
      for (uint32_t e : items_at_level_[static_cast<size_t>(j)])
        u_items.push_back(e);
    std::sort(u_items.begin(), u_items.end());
    std::vector<Level> old_level(u_items.size());
    for (size_t i = 0; i < u_items.size(); ++i)
      old_level[i] = items_[u_items[i]].level;

    // candidate family: coverers at level <= cap containing an orphan
    if (stamp_.size() != coverers_.size()) stamp_.assign(coverers_.size(), 0);
    ++epoch_;
    std::vector<uint32_t> cands;
    std::vector<std::vector<uint32_t>> cand_members;
    std::vector<uint32_t> scratch;
    for (uint32_t e : u_items) {
      scratch.clear();
      prov_->family_ids(e, scratch);
      for (uint32_t s : scratch) {
        if (coverers_[s].lcov > cap) continue;
        if (stamp_[s] != epoch_) {
          stamp_[s] = epoch_;
          cands.push_back(s);
        }
      }
    }
    std::sort(cands.begin(), cands.end());
    cand_members.resize(cands.size());
    if (cand_index_.size() != coverers_.size())
      cand_index_.assign(coverers_.size(), 0);
    for (size_t i = 0; i < cands.size(); ++i) cand_index_[cands[i]] = static_cast<uint32_t>(i);
    for (uint32_t e : u_items) {
      scratch.clear();
      prov_->family_ids(e, scratch);
      for (uint32_t s : scratch)
        if (stamp_[s] == epoch_) cand_members[cand_index_[s]].push_back(e);
    }

    // evictions: every covering set up to cap, idle ones included
    std::vector<uint32_t> evict;
    for (Level j = 0; j <= cap; ++j)
      for (uint32_t s : sets_at_level_[static_cast<size_t>(j)])
        evict.push_back(s);
    std::sort(evict.begin(), evict.end());
    int64_t f_size = static_cast<int64_t>(cands.size());
    for (uint32_t s : evict)
      if (stamp_[s] != epoch_) ++f_size;  // idle set with no orphan members

    for (uint32_t s : evict) {
      Coverer& c = coverers_[s];
      while (!c.members.empty())
        member_remove(c.members.back().item, /*count_dirt=*/false);
      pair_dissolve(s);
    }

    ledger_.reset_dirt_up_to(cap);

    GreedyInput gin;
    gin.item_id_bound = item_count();
    gin.universe_size = u_items.size();
    gin.ids = cands;
    gin.members = std::move(cand_members);
    gin.costs.resize(cands.size());
    for (size_t i = 0; i < cands.size(); ++i)
      gin.costs[i] = prov_->cost(cands[i]);
    if (!u_items.empty()) {
      for (const GreedyPick& pick : greedy_cover(bt_, gin)) {
        if (!global && pick.level > cap + 1)
          throw std::logic_error("reset pair created above i_crit + 1");
        pair_create(pick.set, pick.level, 'g',
                    static_cast<int64_t>(pick.members.size()));
        for (uint32_t e : pick.members) member_add(pick.set, e, true);
      }
    }

    for (size_t i = 0; i < u_items.size(); ++i) {
      const uint32_t e = u_items[i];
      cascade(e, old_level[i], items_[e].level, nullptr, /*allow_rise=*/false);
    }
    cur_.element_level_changes += static_cast<int64_t>(u_items.size());

    in_reset_ = false;
    cur_.resets.push_back(
        {global, cap, static_cast<int64_t>(u_items.size()), f_size});
  }

  // --- snapshots and checker view -------------------------------------------

  CoverSnapshot snapshot() const {
    CoverSnapshot out;
    for (uint32_t s = 0; s < coverer_count(); ++s) {
      const Coverer& c = coverers_[s];
      if (c.lcov == kNoLevel) continue;
      PairSnapshot ps;
      ps.set = s;
      ps.cost = prov_->cost(s);
      ps.level = c.lcov;
      for (const MemberSlot& m : c.members) ps.members.push_back(m.item);
      std::sort(ps.members.begin(), ps.members.end());
      out.push_back(std::move(ps));
    }
    return out;
  }

  StateView build_view() const {
    StateView v;
    v.params = &params_;
    v.bt = &bt_;
    v.ledger = &ledger_;
    v.strict = bank_.exact_mode();
    v.active_items = active_count_;
    v.coverer_lcov.resize(coverer_count());
    v.coverer_cost.resize(coverer_count());
    for (uint32_t s = 0; s < coverer_count(); ++s) {
      v.coverer_lcov[s] = coverers_[s].lcov;
      v.coverer_cost[s] = prov_->cost(s);
      if (coverers_[s].lcov != kNoLevel) {
        PairView pv;
        pv.set = s;
        pv.cost = prov_->cost(s);
        pv.lcov = coverers_[s].lcov;
        for (const MemberSlot& m : coverers_[s].members)
          pv.members.push_back({m.item, m.initial});
        v.pairs.push_back(std::move(pv));
      }
    }
    v.item_active.resize(item_count());
    v.item_level.resize(item_count());
    v.item_owner.resize(item_count());
    v.families.resize(item_count());
    for (uint32_t e = 0; e < item_count(); ++e) {
      v.item_active[e] = items_[e].active ? 1 : 0;
      v.item_level[e] = items_[e].level;
      v.item_owner[e] =
          items_[e].owner == kNone ? -1 : static_cast<int64_t>(items_[e].owner);
      if (items_[e].active) prov_->family_ids(e, v.families[e]);
    }
    const CounterBank* bank = &bank_;
    v.ctr_window = [bank](uint32_t s) { return bank->window(s); };
    v.ctr_approx = [bank](uint32_t s, Level j) { return bank->approx_count(s, j); };
    v.ctr_exact = [bank](uint32_t s, Level j) { return bank->exact_below(s, j); };
    v.fresh_pairs = last_.pairs_created;
    return v;
  }

 private:
  struct MemberSlot {
    uint32_t item;
    bool initial;
  };
  struct Coverer {
    Level lcov = kNoLevel;
    std::vector<MemberSlot> members;
    uint32_t reg_pos = 0;
  };
  struct Item {
    bool active = false;
    Level level = kNoLevel;
    uint32_t owner = kNone;
    uint32_t pos_in_members = 0;
    uint32_t reg_pos = 0;
  };

  enum RegKind { set_reg_of_ = 0, item_reg_of_ = 1 };

  void registry_add(std::vector<std::vector<uint32_t>>& reg, Level lev,
                    uint32_t id, uint32_t& pos, RegKind) {
    auto& bucket = reg.at(static_cast<size_t>(lev));
    pos = static_cast<uint32_t>(bucket.size());
    bucket.push_back(id);
  }

  void registry_remove(std::vector<std::vector<uint32_t>>& reg, Level lev,
                       uint32_t pos, RegKind kind) {
    auto& bucket = reg.at(static_cast<size_t>(lev));
    const uint32_t moved = bucket.back();
    bucket[pos] = moved;
    bucket.pop_back();
    if (pos < bucket.size()) {
      if (kind == set_reg_of_)
        coverers_[moved].reg_pos = pos;
      else
        items_[moved].reg_pos = pos;
    }
  }

  Params params_;
  BetaTable bt_;
  CounterBank bank_;
  LevelLedger ledger_;
  const Provider* prov_ = nullptr;

  std::vector<Coverer> coverers_;
  std::vector<Item> items_;
  std::vector<std::vector<uint32_t>> sets_at_level_;
  std::vector<std::vector<uint32_t>> items_at_level_;

  int64_t active_count_ = 0;
  int64_t covering_count_ = 0;
  uint64_t step_clock_ = 0;
  uint64_t next_global_reset_ = 1;
  bool in_reset_ = false;
  bool setup_ = false;
  int32_t rise_depth_ = 0;
  int32_t max_rise_roots_ = 1;
  uint64_t refresh_baseline_ = 0;

  StepReport cur_;
  StepReport last_;
  RunTotals totals_;

  mutable std::vector<uint32_t> stamp_;
  mutable std::vector<uint32_t> cand_index_;
  uint32_t epoch_ = 0;
};

}  // namespace dsc
