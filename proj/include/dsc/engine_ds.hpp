#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "dsc/engine_core.hpp"
#include "dsc/level_arith.hpp"

namespace dsc {

// Dynamic graph for the dominating-set engine. Adjacency is kept as
// intrusive doubly-linked edge lists (O(1) insert/remove, O(degree) scans);
// each edge carries the two counter cells that track one endpoint inside the
// other endpoint's buckets.
class DsProvider {
 public:
  static constexpr uint32_t kNil = UINT32_MAX;

  void init(std::vector<double> costs, std::vector<uint32_t> self_cells) {
    cost_ = std::move(costs);
    self_cell_ = std::move(self_cells);
    head_.assign(cost_.size(), kNil);
    degree_.assign(cost_.size(), 0);
  }

  double cost(uint32_t v) const { return cost_[v]; }
  uint32_t degree(uint32_t v) const { return degree_[v]; }
  uint32_t vertex_count() const { return static_cast<uint32_t>(cost_.size()); }

  bool has_edge(uint32_t u, uint32_t v) const {
    return edge_keys_.count(key(u, v)) > 0;
  }

  // Returns the new edge index; cells must be freshly allocated.
  uint32_t link(uint32_t u, uint32_t v, uint32_t cell_u_holds_v,
                uint32_t cell_v_holds_u) {
    uint32_t idx;
    if (!free_.empty()) {
      idx = free_.back();
      free_.pop_back();
    } else {
      idx = static_cast<uint32_t>(edges_.size());
      edges_.push_back({});
    }
    EdgeRec& r = edges_[idx];
    r.ep[0] = u;
    r.ep[1] = v;
    r.cell_in[0] = cell_u_holds_v;  // item v tracked in u's buckets
    r.cell_in[1] = cell_v_holds_u;
    for (int s = 0; s < 2; ++s) {
      const uint32_t vtx = r.ep[s];
      const uint32_t tag = (idx << 1) | static_cast<uint32_t>(s);
      r.next[s] = head_[vtx];
      r.prev[s] = kNil;
      if (head_[vtx] != kNil) {
        EdgeRec& h = edges_[head_[vtx] >> 1];
        h.prev[head_[vtx] & 1] = tag;
      }
      head_[vtx] = tag;
      ++degree_[vtx];
    }
    edge_keys_.insert(key(u, v));
    return idx;
  }

  // Unlinks and returns the edge's two cells (u-holds-v, v-holds-u).
  std::pair<uint32_t, uint32_t> unlink(uint32_t u, uint32_t v) {
    const uint32_t tag0 = find(u, v);
    const uint32_t idx = tag0 >> 1;
    EdgeRec& r = edges_[idx];
    for (int s = 0; s < 2; ++s) {
      const uint32_t vtx = r.ep[s];
      if (r.prev[s] != kNil)
        edges_[r.prev[s] >> 1].next[r.prev[s] & 1] = r.next[s];
      else
        head_[vtx] = r.next[s];
      if (r.next[s] != kNil)
        edges_[r.next[s] >> 1].prev[r.next[s] & 1] = r.prev[s];
      --degree_[vtx];
    }
    edge_keys_.erase(key(u, v));
    free_.push_back(idx);
    const uint32_t a = r.ep[0] == u ? r.cell_in[0] : r.cell_in[1];
    const uint32_t b = r.ep[0] == u ? r.cell_in[1] : r.cell_in[0];
    return {a, b};
  }

  // Coverers of v: v itself plus every neighbour; f(coverer, cell tracking v).
  template <class F>
  void for_each_coverer_of(uint32_t v, F&& f) const {
    f(v, self_cell_[v]);
    for (uint32_t tag = head_[v]; tag != kNil;) {
      const EdgeRec& r = edges_[tag >> 1];
      const uint32_t s = tag & 1;
      f(r.ep[1 - s], r.cell_in[1 - s]);
      tag = r.next[s];
    }
  }

  void family_ids(uint32_t v, std::vector<uint32_t>& out) const {
    out.push_back(v);
    for (uint32_t tag = head_[v]; tag != kNil;) {
      const EdgeRec& r = edges_[tag >> 1];
      const uint32_t s = tag & 1;
      out.push_back(r.ep[1 - s]);
      tag = r.next[s];
    }
  }

  std::vector<uint32_t> neighbors(uint32_t v) const {
    std::vector<uint32_t> out;
    for (uint32_t tag = head_[v]; tag != kNil;) {
      const EdgeRec& r = edges_[tag >> 1];
      const uint32_t s = tag & 1;
      out.push_back(r.ep[1 - s]);
      tag = r.next[s];
    }
    return out;
  }

 private:
  struct EdgeRec {
    uint32_t ep[2] = {0, 0};
    uint32_t next[2] = {kNil, kNil};
    uint32_t prev[2] = {kNil, kNil};
    uint32_t cell_in[2] = {0, 0};
  };

  static uint64_t key(uint32_t u, uint32_t v) {
    const uint64_t a = std::min(u, v), b = std::max(u, v);
    return (a << 32) | b;
  }

  uint32_t find(uint32_t u, uint32_t v) const {
    for (uint32_t tag = head_[u]; tag != kNil;) {
      const EdgeRec& r = edges_[tag >> 1];
      const uint32_t s = tag & 1;
      if (r.ep[1 - s] == v) return tag;
      tag = r.next[s];
    }
    throw std::logic_error("edge record not found");
  }

  std::vector<EdgeRec> edges_;
  std::vector<uint32_t> free_;
  std::vector<uint32_t> head_;
  std::vector<uint32_t> degree_;
  std::vector<uint32_t> self_cell_;
  std::vector<double> cost_;
  std::unordered_set<uint64_t> edge_keys_;
};

// Dynamic weighted dominating set over edge insertions/deletions. Every
// vertex is both a potential dominator and a dominated item; at the outset
// each vertex dominates itself.
class DsEngine {
 public:
  DsEngine(std::vector<double> costs, double c_ratio, double eps,
           uint32_t max_degree, bool exact_counters = false,
           bool keep_log = true)
      : core_(Params(eps, static_cast<int64_t>(costs.size()), c_ratio),
              exact_counters, keep_log),
        max_degree_(max_degree) {
    const uint32_t n = static_cast<uint32_t>(costs.size());
    for (double c : costs) {
      if (lt_tol(c, 1.0 / c_ratio) || lt_tol(1.0, c))
        throw std::invalid_argument("vertex cost outside [1/C, 1]");
      core_.register_coverer(c);
    }
    core_.register_items(n);
    std::vector<uint32_t> self_cells(n);
    for (uint32_t v = 0; v < n; ++v) self_cells[v] = core_.bank().alloc_cell();
    prov_.init(std::move(costs), std::move(self_cells));
    core_.attach_provider(&prov_);
    core_.set_max_rise_roots(2);

    core_.set_setup_mode(true);
    for (uint32_t v = 0; v < n; ++v) {
      core_.set_active(v, true);
      const Level lev = core_.beta_table().level_of_ratio(1, prov_.cost(v));
      core_.pair_create(v, lev, 'i', 1);
      core_.member_add(v, v, /*initial=*/true);
      core_.cascade(v, std::nullopt, lev);
    }
    core_.set_setup_mode(false);
  }

  const StepReport& insert_edge(uint32_t u, uint32_t v) {
    check_edge_args(u, v);
    if (prov_.has_edge(u, v)) throw std::invalid_argument("duplicate edge");
    if (prov_.degree(u) >= max_degree_ || prov_.degree(v) >= max_degree_)
      throw std::invalid_argument("declared max degree exceeded");
    core_.begin_step('+', u, v);

    const uint32_t cell_uv = core_.bank().alloc_cell();
    const uint32_t cell_vu = core_.bank().alloc_cell();
    prov_.link(u, v, cell_uv, cell_vu);
    std::vector<RefreshEvent> events;
    if (auto r = core_.bank().record_change(u, std::nullopt,
                                            core_.item_level(v), v, cell_uv))
      events.push_back({u, *r});
    if (auto r = core_.bank().record_change(v, std::nullopt,
                                            core_.item_level(u), u, cell_vu))
      events.push_back({v, *r});

    const bool viol_u = core_.coverer_level(u) > core_.item_level(v);
    const bool viol_v = core_.coverer_level(v) > core_.item_level(u);
    if (viol_u && viol_v)
      throw std::logic_error("both endpoints dominate above the other's level");
    if (viol_u || viol_v) {
      const uint32_t dominator = viol_u ? u : v;
      const uint32_t moved = viol_u ? v : u;
      const Level from = core_.item_level(moved);
      core_.member_remove(moved, /*count_dirt=*/true);
      core_.member_add(dominator, moved, /*initial=*/false);
      core_.current().inv3_moves += 1;
      core_.current().element_level_changes += 1;
      core_.cascade(moved, from, core_.coverer_level(dominator), &events);
    } else {
      core_.evaluate(events);
    }
    return core_.end_step();
  }

  const StepReport& delete_edge(uint32_t u, uint32_t v) {
    check_edge_args(u, v);
    if (!prov_.has_edge(u, v)) throw std::invalid_argument("edge not present");
    core_.begin_step('-', u, v);

    // Both directions can hold at once (mutual domination at equal levels);
    // each orphan is re-homed, lower id first.
    std::vector<std::pair<uint32_t, uint32_t>> orphans;  // (vertex, lost dominator)
    if (core_.item_owner(v) == u) orphans.push_back({v, u});
    if (core_.item_owner(u) == v) orphans.push_back({u, v});
    std::sort(orphans.begin(), orphans.end());

    const auto [cell_uv, cell_vu] = prov_.unlink(u, v);
    core_.bank().record_change(u, core_.item_level(v), std::nullopt, v, cell_uv);
    core_.bank().record_change(v, core_.item_level(u), std::nullopt, u, cell_vu);
    core_.bank().free_cell(cell_uv);
    core_.bank().free_cell(cell_vu);

    for (const auto& [y, old_dom] : orphans) {
      if (core_.item_owner(y) != old_dom) continue;  // re-homed by a cascade
      const Level from = core_.item_level(y);
      core_.member_remove(y, /*count_dirt=*/true);
      core_.bank().force_refresh(old_dom);
      // highest-level dominator among y's closed neighbourhood, lowest id on
      // ties; fall back to a fresh self-pair.
      std::vector<uint32_t> fam;
      prov_.family_ids(y, fam);
      std::sort(fam.begin(), fam.end());
      uint32_t z = kNone;
      Level zl = kNoLevel;
      for (uint32_t w : fam) {
        if (core_.coverer_level(w) > zl) {
          zl = core_.coverer_level(w);
          z = w;
        }
      }
      Level to;
      if (zl >= 0) {
        core_.member_add(z, y, /*initial=*/false);
        to = zl;
      } else {
        to = core_.beta_table().level_of_ratio(1, prov_.cost(y));
        core_.pair_create(y, to, 'i', 1);
        core_.member_add(y, y, /*initial=*/true);
      }
      core_.current().element_level_changes += 1;
      core_.cascade(y, from, to);
    }
    return core_.end_step();
  }

  CoverSnapshot snapshot() const { return core_.snapshot(); }
  StateView view() const { return core_.build_view(); }
  double cover_cost() const { return core_.ledger().total_cost(); }
  const RunTotals& totals() const { return core_.totals(); }
  const StepReport& last_report() const { return core_.last_report(); }
  const DsProvider& graph() const { return prov_; }
  const EngineCore<DsProvider>& core() const { return core_; }
  EngineCore<DsProvider>& core() { return core_; }

 private:
  void check_edge_args(uint32_t u, uint32_t v) const {
    if (u == v) throw std::invalid_argument("self-loop");
    if (u >= prov_.vertex_count() || v >= prov_.vertex_count())
      throw std::invalid_argument("unknown vertex");
  }

  EngineCore<DsProvider> core_;
  DsProvider prov_;
  uint32_t max_degree_;
};

}  // namespace dsc
