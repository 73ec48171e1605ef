#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsc/engine_core.hpp"
#include "dsc/level_arith.hpp"

namespace dsc {

// Static set family with costs; the element universe is fixed, elements are
// activated and deactivated by the update sequence.
struct SetSystem {
  struct Set {
    double cost = 1.0;
    std::vector<uint32_t> elements;
  };
  struct Element {
    std::vector<uint32_t> sets;  // ascending
  };
  std::vector<Set> sets;
  std::vector<Element> elements;

  static SetSystem build(uint32_t n_elements,
                         const std::vector<std::pair<double, std::vector<uint32_t>>>& set_defs,
                         double c_ratio) {
    SetSystem sys;
    sys.elements.resize(n_elements);
    sys.sets.reserve(set_defs.size());
    for (uint32_t s = 0; s < set_defs.size(); ++s) {
      const auto& [cost, elems] = set_defs[s];
      if (lt_tol(cost, 1.0 / c_ratio) || lt_tol(1.0, cost))
        throw std::invalid_argument("set cost outside [1/C, 1]");
      Set st;
      st.cost = cost;
      st.elements = elems;
      for (uint32_t e : elems) {
        if (e >= n_elements) throw std::invalid_argument("element id out of range");
        sys.elements[e].sets.push_back(s);
      }
      sys.sets.push_back(std::move(st));
    }
    for (auto& e : sys.elements) std::sort(e.sets.begin(), e.sets.end());
    return sys;
  }

  uint32_t max_frequency() const {
    size_t f = 0;
    for (const auto& e : elements) f = std::max(f, e.sets.size());
    return static_cast<uint32_t>(f);
  }
};

struct ScProvider {
  const SetSystem* sys = nullptr;
  std::vector<uint32_t> cell_base;  // per element, block of |F_e| cells

  double cost(uint32_t s) const { return sys->sets[s].cost; }

  template <class F>
  void for_each_coverer_of(uint32_t e, F&& f) const {
    const auto& fam = sys->elements[e].sets;
    for (uint32_t k = 0; k < fam.size(); ++k) f(fam[k], cell_base[e] + k);
  }

  void family_ids(uint32_t e, std::vector<uint32_t>& out) const {
    const auto& fam = sys->elements[e].sets;
    out.insert(out.end(), fam.begin(), fam.end());
  }
};

// Dynamic weighted set cover. insert/delete activate and deactivate
// elements; the maintained cover is read through snapshot()/cost().
class ScEngine {
 public:
  ScEngine(SetSystem sys, const Params& params, bool exact_counters = false,
           bool keep_log = true)
      : sys_(std::move(sys)), core_(params, exact_counters, keep_log) {
    for (const auto& s : sys_.sets) core_.register_coverer(s.cost);
    core_.register_items(static_cast<uint32_t>(sys_.elements.size()));
    prov_.sys = &sys_;
    prov_.cell_base.resize(sys_.elements.size());
    for (uint32_t e = 0; e < sys_.elements.size(); ++e) {
      const auto& fam = sys_.elements[e].sets;
      uint32_t base = kNone;
      for (uint32_t k = 0; k < fam.size(); ++k) {
        const uint32_t c = core_.bank().alloc_cell();
        if (k == 0) base = c;
      }
      prov_.cell_base[e] = base;
    }
    core_.attach_provider(&prov_);
    core_.set_max_rise_roots(1);
  }

  const StepReport& insert(uint32_t e) {
    check_element(e);
    if (core_.item_active(e)) throw std::invalid_argument("element already active");
    if (sys_.elements[e].sets.empty())
      throw std::invalid_argument("element belongs to no set");
    core_.begin_step('+', e, 0);
    core_.set_active(e, true);

    const auto& fam = sys_.elements[e].sets;  // ascending: strict > keeps lowest id
    uint32_t best = kNone;
    Level best_lcov = kNoLevel;
    for (uint32_t s : fam) {
      if (core_.coverer_level(s) > best_lcov) {
        best_lcov = core_.coverer_level(s);
        best = s;
      }
    }
    if (best_lcov >= 0) {
      core_.member_add(best, e, /*initial=*/false);
      core_.current().element_level_changes += 1;
      core_.cascade(e, std::nullopt, best_lcov);
    } else {
      uint32_t cheapest = fam[0];
      for (uint32_t s : fam)
        if (sys_.sets[s].cost < sys_.sets[cheapest].cost) cheapest = s;
      const Level lev = core_.beta_table().level_of_ratio(1, sys_.sets[cheapest].cost);
      core_.pair_create(cheapest, lev, 'i', 1);
      core_.member_add(cheapest, e, /*initial=*/true);
      core_.current().element_level_changes += 1;
      core_.cascade(e, std::nullopt, lev);
    }
    return core_.end_step();
  }

  const StepReport& erase(uint32_t e) {
    check_element(e);
    if (!core_.item_active(e)) throw std::invalid_argument("element not active");
    core_.begin_step('-', e, 0);
    const Level from = core_.item_level(e);
    core_.member_remove(e, /*count_dirt=*/true);
    core_.set_active(e, false);
    core_.current().element_level_changes += 1;
    core_.cascade(e, from, std::nullopt);
    return core_.end_step();
  }

  CoverSnapshot snapshot() const { return core_.snapshot(); }
  StateView view() const { return core_.build_view(); }
  double cover_cost() const { return core_.ledger().total_cost(); }
  const RunTotals& totals() const { return core_.totals(); }
  const StepReport& last_report() const { return core_.last_report(); }
  const SetSystem& system() const { return sys_; }
  const EngineCore<ScProvider>& core() const { return core_; }
  EngineCore<ScProvider>& core() { return core_; }

 private:
  void check_element(uint32_t e) const {
    if (e >= sys_.elements.size())
      throw std::invalid_argument("unknown element " + std::to_string(e));
  }

  SetSystem sys_;
  EngineCore<ScProvider> core_;
  ScProvider prov_;
};

}  // namespace dsc
