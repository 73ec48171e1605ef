#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsc/rng.hpp"

namespace dsc {

// A generated instance plus its update sequence. Deterministic function of
// the generator parameters; serialized byte-identically by io.hpp.
struct Workload {
  enum Kind { kSetCover, kDomSet };
  struct Op {
    char op;  // '+' or '-'
    uint32_t a = 0;
    uint32_t b = 0;  // second endpoint (DS only)
  };

  Kind kind = kSetCover;
  uint32_t n = 0;      // elements (SC) or vertices (DS)
  uint32_t f_or_delta = 0;
  double c_ratio = 1.0;
  double eps_hint = 0.2;
  std::vector<std::pair<double, std::vector<uint32_t>>> sets;  // SC
  std::vector<double> vertex_costs;                            // DS
  std::vector<Op> ops;
  std::string tag;
};

namespace detail {
inline double draw_cost(SplitMix64& rng, double c_ratio) {
  if (c_ratio <= 1.0) return 1.0;
  // log-uniform over [1/C, 1]
  return std::exp(-rng.next_unit() * std::log(c_ratio));
}
}  // namespace detail

// Random set system with uniformly chosen memberships and an insert/delete
// churn mix. `churn` is the probability a step deletes an active element.
inline Workload make_random_sc(uint32_t n, uint32_t m, uint32_t f,
                               double c_ratio, uint32_t op_count, double churn,
                               uint64_t seed) {
  if (n == 0 || m == 0 || f == 0 || f > m)
    throw std::invalid_argument("bad random_sc shape");
  if (static_cast<uint64_t>(m) * f < n)
    throw std::invalid_argument("infeasible random_sc parameters (m*f < n)");
  Workload w;
  w.kind = Workload::kSetCover;
  w.n = n;
  w.f_or_delta = f;
  w.c_ratio = c_ratio;
  w.tag = "random_sc n=" + std::to_string(n) + " m=" + std::to_string(m) +
          " f=" + std::to_string(f) + " seed=" + std::to_string(seed);
  SplitMix64 rng(seed);
  w.sets.resize(m);
  for (auto& [cost, elems] : w.sets) {
    cost = detail::draw_cost(rng, c_ratio);
    (void)elems;
  }
  std::vector<uint32_t> pick;
  for (uint32_t e = 0; e < n; ++e) {
    const uint32_t freq = 1 + static_cast<uint32_t>(rng.next_below(f));
    pick.clear();
    while (pick.size() < freq) {
      const uint32_t s = static_cast<uint32_t>(rng.next_below(m));
      if (std::find(pick.begin(), pick.end(), s) == pick.end())
        pick.push_back(s);
    }
    for (uint32_t s : pick) w.sets[s].second.push_back(e);
  }
  for (auto& [cost, elems] : w.sets) std::sort(elems.begin(), elems.end());

  std::vector<uint32_t> inactive, active;
  std::vector<uint32_t> where(n);  // index in its current vector
  for (uint32_t e = 0; e < n; ++e) {
    inactive.push_back(e);
    where[e] = e;
  }
  auto take = [&](std::vector<uint32_t>& from, std::vector<uint32_t>& to,
                  SplitMix64& r) {
    const uint32_t i = static_cast<uint32_t>(r.next_below(from.size()));
    const uint32_t e = from[i];
    from[i] = from.back();
    where[from[i]] = i;
    from.pop_back();
    where[e] = static_cast<uint32_t>(to.size());
    to.push_back(e);
    return e;
  };
  w.ops.reserve(op_count);
  for (uint32_t t = 0; t < op_count; ++t) {
    const bool want_delete = !active.empty() && rng.next_unit() < churn;
    if (want_delete || inactive.empty()) {
      w.ops.push_back({'-', take(active, inactive, rng), 0});
    } else {
      w.ops.push_back({'+', take(inactive, active, rng), 0});
    }
  }
  return w;
}

// Random graph churn with a hard per-vertex degree cap.
inline Workload make_random_ds(uint32_t n, uint32_t max_degree, double c_ratio,
                               uint32_t op_count, double churn, uint64_t seed) {
  if (n < 2 || max_degree == 0)
    throw std::invalid_argument("bad random_ds shape");
  Workload w;
  w.kind = Workload::kDomSet;
  w.n = n;
  w.f_or_delta = max_degree;
  w.c_ratio = c_ratio;
  w.tag = "random_ds n=" + std::to_string(n) + " delta=" +
          std::to_string(max_degree) + " seed=" + std::to_string(seed);
  SplitMix64 rng(seed);
  w.vertex_costs.resize(n);
  for (double& c : w.vertex_costs) c = detail::draw_cost(rng, c_ratio);

  std::vector<uint32_t> degree(n, 0);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  auto has_edge = [&](uint32_t u, uint32_t v) {
    for (const auto& [a, b] : edges)
      if ((a == u && b == v) || (a == v && b == u)) return true;
    return false;
  };
  w.ops.reserve(op_count);
  for (uint32_t t = 0; t < op_count; ++t) {
    const bool want_delete = !edges.empty() && rng.next_unit() < churn;
    bool inserted = false;
    if (!want_delete) {
      for (int attempt = 0; attempt < 200 && !inserted; ++attempt) {
        const uint32_t u = static_cast<uint32_t>(rng.next_below(n));
        const uint32_t v = static_cast<uint32_t>(rng.next_below(n));
        if (u == v || degree[u] >= max_degree || degree[v] >= max_degree)
          continue;
        if (has_edge(u, v)) continue;
        edges.push_back({std::min(u, v), std::max(u, v)});
        ++degree[u];
        ++degree[v];
        w.ops.push_back({'+', std::min(u, v), std::max(u, v)});
        inserted = true;
      }
    }
    if (!inserted) {
      if (edges.empty()) continue;  // saturated-and-empty corner
      const uint32_t i = static_cast<uint32_t>(rng.next_below(edges.size()));
      const auto [u, v] = edges[i];
      edges[i] = edges.back();
      edges.pop_back();
      --degree[u];
      --degree[v];
      w.ops.push_back({'-', u, v});
    }
  }
  return w;
}

// Incremental set-cover sequence that forces Omega(log n) amortized element
// level changes when replayed at beta = sqrt(2): n = 2^q unit-cost elements
// inserted in batches of four, where batch i is coverable by the sets indexed
// (1-based) j = 2^{q-1}(1 - 2^{-k}) + ceil(i / 2^k) for k = 0..q-2.
inline Workload make_lower_bound_sc(uint32_t q) {
  if (q < 2) throw std::invalid_argument("lower_bound_sc needs q >= 2");
  const uint32_t n = 1u << q;
  const uint32_t m = n / 2 - 1;
  Workload w;
  w.kind = Workload::kSetCover;
  w.n = n;
  w.f_or_delta = q - 1;
  w.c_ratio = 1.0;
  w.eps_hint = std::sqrt(2.0) - 1.0;
  w.tag = "lower_bound_sc q=" + std::to_string(q) +
          " (replay at beta=sqrt(2))";
  w.sets.assign(m, {1.0, {}});
  for (uint32_t i = 1; i <= n / 4; ++i) {
    for (uint32_t k = 0; k + 2 <= q; ++k) {
      const uint32_t j =
          (n / 2) - (n / 2) / (1u << k) + (i + (1u << k) - 1) / (1u << k);
      for (uint32_t x = 0; x < 4; ++x)
        w.sets[j - 1].second.push_back(4 * (i - 1) + x);
    }
  }
  for (auto& [cost, elems] : w.sets) std::sort(elems.begin(), elems.end());
  for (uint32_t e = 0; e < n; ++e) w.ops.push_back({'+', e, 0});
  return w;
}

// Decremental dominating-set counterpart: 2^q batches against a binary tree
// of 2^{q+1}-1 hub vertices; all edges are inserted, then peeled root-first,
// recursing into the lower-indexed half-root before the higher one.
inline Workload make_lower_bound_ds(uint32_t q) {
  if (q < 2) throw std::invalid_argument("lower_bound_ds needs q >= 2");
  const uint32_t hubs = (1u << (q + 1)) - 1;
  const uint32_t batches = 1u << q;
  Workload w;
  w.kind = Workload::kDomSet;
  w.c_ratio = 1.0;
  w.eps_hint = std::sqrt(2.0) - 1.0;
  w.tag = "lower_bound_ds q=" + std::to_string(q) +
          " (replay at beta=sqrt(2); peel lower half-root first)";

  // batch i (1-based) has x_i + 3 vertices, x_i = index of lowest set bit
  std::vector<std::pair<uint32_t, uint32_t>> batch_span(batches + 1);
  uint32_t next_id = hubs;  // hubs take ids 0 .. hubs-1 (v_j = id j-1)
  for (uint32_t i = 1; i <= batches; ++i) {
    const uint32_t x = static_cast<uint32_t>(std::countr_zero(i));
    batch_span[i] = {next_id, next_id + x + 3};
    next_id += x + 3;
  }
  w.n = next_id;
  w.f_or_delta = (1u << (q + 2)) - 1;  // the root's degree
  w.vertex_costs.assign(w.n, 1.0);

  auto hub_id = [&](uint32_t k, uint32_t t) {
    // 1-based hub index 2^{q+1}(1 - 2^{-k}) + t, as an id
    return (1u << (q + 1)) - (1u << (q + 1)) / (1u << k) + t - 1;
  };

  // insert every edge: per batch, root-level hub first
  for (uint32_t i = 1; i <= batches; ++i) {
    for (uint32_t b = batch_span[i].first; b < batch_span[i].second; ++b) {
      for (int32_t k = static_cast<int32_t>(q); k >= 0; --k) {
        const uint32_t h = hub_id(static_cast<uint32_t>(k),
                                  (i + (1u << k) - 1) / (1u << k));
        w.ops.push_back({'+', h, b});
      }
    }
  }
  // peel: delete the hub's batch edges in batch order, then recurse
  auto peel = [&](auto&& self, uint32_t k, uint32_t t) -> void {
    const uint32_t h = hub_id(k, t);
    const uint32_t lo = (t - 1) * (1u << k) + 1;
    const uint32_t hi = t * (1u << k);
    for (uint32_t i = lo; i <= hi; ++i)
      for (uint32_t b = batch_span[i].first; b < batch_span[i].second; ++b)
        w.ops.push_back({'-', h, b});
    if (k > 0) {
      self(self, k - 1, 2 * t - 1);
      self(self, k - 1, 2 * t);
    }
  };
  peel(peel, q, 1);
  return w;
}

}  // namespace dsc
