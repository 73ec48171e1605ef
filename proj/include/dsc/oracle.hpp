#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsc/engine_sc.hpp"
#include "dsc/greedy.hpp"
#include "dsc/ledger.hpp"
#include "dsc/level_arith.hpp"
#include "dsc/report.hpp"
#include "dsc/view.hpp"

namespace dsc {

// ---------------------------------------------------------------------------
// Brute-force optimum

// Exact minimum cover cost for the active elements; +inf when infeasible.
// Branch and bound over at most 22 useful sets.
inline double brute_force_opt(const SetSystem& sys,
                              const std::vector<char>& active) {
  std::vector<int32_t> compact(sys.elements.size(), -1);
  int32_t n_active = 0;
  for (uint32_t e = 0; e < sys.elements.size(); ++e)
    if (active[e]) compact[e] = n_active++;
  if (n_active == 0) return 0.0;
  if (n_active > 63) throw std::invalid_argument("oracle scale exceeded");

  const uint64_t full = (n_active == 63) ? ~0ULL >> 1
                                         : ((1ULL << n_active) - 1);
  std::vector<uint64_t> masks;
  std::vector<double> costs;
  for (const auto& s : sys.sets) {
    uint64_t m = 0;
    for (uint32_t e : s.elements)
      if (compact[e] >= 0) m |= 1ULL << compact[e];
    if (m == 0) continue;
    masks.push_back(m);
    costs.push_back(s.cost);
  }
  if (masks.size() > 22) throw std::invalid_argument("oracle scale exceeded");

  // explore sets in decreasing coverage order
  std::vector<size_t> order(masks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::popcount(masks[a]) > std::popcount(masks[b]);
  });

  double best = std::numeric_limits<double>::infinity();
  const double min_cost =
      costs.empty() ? 0.0 : *std::min_element(costs.begin(), costs.end());
  int64_t max_cov = 0;
  for (uint64_t m : masks) max_cov = std::max<int64_t>(max_cov, std::popcount(m));

  auto rec = [&](auto&& self, size_t idx, uint64_t covered, double cost) -> void {
    if (covered == full) {
      best = std::min(best, cost);
      return;
    }
    if (idx == order.size()) return;
    const int64_t missing = std::popcount(full & ~covered);
    const double bound =
        cost + std::ceil(static_cast<double>(missing) /
                         static_cast<double>(max_cov)) *
                   min_cost;
    if (bound >= best) return;
    const uint64_t m = masks[order[idx]];
    if ((m & ~covered) != 0)
      self(self, idx + 1, covered | m, cost + costs[order[idx]]);
    self(self, idx + 1, covered, cost);
  };
  rec(rec, 0, 0, 0.0);
  return best;
}

// ---------------------------------------------------------------------------
// Approximation verdict

struct ApproxVerdict {
  bool pass = false;
  double bound = 0.0;           // opt * beta^4 * (ln n + 1)
  double headline_ratio = 0.0;  // cost / (opt * ln n), when ln n >= 1/eps
  bool headline_applicable = false;
};

inline ApproxVerdict approx_verdict(double cover_cost, double opt,
                                    int64_t n_active, const Params& p) {
  ApproxVerdict v;
  if (n_active < 1) throw std::invalid_argument("approx verdict needs n >= 1");
  if (opt == 0.0) {
    v.pass = cover_cost <= 0.0;
    return v;
  }
  const double ln_n = std::log(static_cast<double>(n_active));
  const double b4 = p.beta * p.beta * p.beta * p.beta;
  v.bound = opt * b4 * (ln_n + 1.0);
  v.pass = cover_cost < v.bound + 1e-9;
  if (ln_n >= 1.0 / p.eps) {
    v.headline_applicable = true;
    v.headline_ratio = cover_cost / (opt * ln_n);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Invariant checker

struct Violation {
  enum Kind {
    kInv1,
    kInv2,
    kInv3,
    kCover,
    kCleandom,
    kPairUpper,
    kCounterStaleness,
    kLedgerDrift,
  };
  Kind kind;
  uint64_t step = 0;
  std::string detail;
};

inline const char* violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::kInv1: return "INV1";
    case Violation::kInv2: return "INV2";
    case Violation::kInv3: return "INV3";
    case Violation::kCover: return "COVER";
    case Violation::kCleandom: return "CLEANDOM";
    case Violation::kPairUpper: return "PAIR_UPPER";
    case Violation::kCounterStaleness: return "COUNTER_STALENESS";
    case Violation::kLedgerDrift: return "LEDGER_DRIFT";
  }
  return "?";
}

// Recomputes every maintained quantity from scratch (or, for the dirt
// counters, from the departure log folded incrementally) and compares with
// the engine's view. One checker instance accompanies one engine run.
class InvariantChecker {
 public:
  explicit InvariantChecker(Level top)
      : d_initial_(static_cast<size_t>(top) + 1, 0.0),
        d_all_(static_cast<size_t>(top) + 1, 0.0),
        e_initial_(static_cast<size_t>(top) + 1, 0) {}

  // Informational: dirt as if every departure paid, not just initial members.
  double alt_dirt_total() const {
    double s = 0.0;
    for (double d : d_all_) s += d;
    return s;
  }

  std::vector<Violation> check(const StateView& v, uint64_t step) {
    std::vector<Violation> out;
    const Params& p = *v.params;
    const BetaTable& bt = *v.bt;
    const double slack = v.strict ? 0.0 : p.eps;

    fold_log(*v.ledger, bt);

    // cover validity: each active item covered by exactly one pair that
    // contains it, at the pair's level
    std::vector<int64_t> seen(v.item_level.size(), 0);
    std::vector<double> level_cost(static_cast<size_t>(v.ledger->top()) + 1, 0.0);
    std::vector<int64_t> level_sets(static_cast<size_t>(v.ledger->top()) + 1, 0);
    std::vector<int64_t> level_items(static_cast<size_t>(v.ledger->top()) + 1, 0);
    for (const PairView& pv : v.pairs) {
      level_cost[static_cast<size_t>(pv.lcov)] += pv.cost;
      level_sets[static_cast<size_t>(pv.lcov)] += 1;
      for (const auto& [e, initial] : pv.members) {
        seen[e] += 1;
        if (v.item_owner[e] != static_cast<int64_t>(pv.set) ||
            v.item_level[e] != pv.lcov)
          out.push_back({Violation::kCover, step,
                         "member " + std::to_string(e) + " of set " +
                             std::to_string(pv.set) + " has wrong owner/level"});
      }
    }
    for (uint32_t e = 0; e < v.item_level.size(); ++e) {
      if (v.item_active[e]) {
        level_items[static_cast<size_t>(v.item_level[e])] += 1;
        if (seen[e] != 1)
          out.push_back({Violation::kCover, step,
                         "active item " + std::to_string(e) + " covered " +
                             std::to_string(seen[e]) + " times"});
        bool owner_in_family = false;
        for (uint32_t s : v.families[e])
          if (static_cast<int64_t>(s) == v.item_owner[e]) owner_in_family = true;
        if (!owner_in_family)
          out.push_back({Violation::kCover, step,
                         "item " + std::to_string(e) +
                             " owned by a set that cannot cover it"});
      } else if (seen[e] != 0 || v.item_owner[e] != -1) {
        out.push_back({Violation::kCover, step,
                       "inactive item " + std::to_string(e) + " still covered"});
      }
    }

    // Invariant 3
    for (uint32_t e = 0; e < v.item_level.size(); ++e) {
      if (!v.item_active[e]) continue;
      for (uint32_t s : v.families[e])
        if (v.coverer_lcov[s] > v.item_level[e])
          out.push_back({Violation::kInv3, step,
                         "set " + std::to_string(s) + " covers at " +
                             std::to_string(v.coverer_lcov[s]) + " above item " +
                             std::to_string(e) + " at " +
                             std::to_string(v.item_level[e])});
    }

    // Invariant 1 (+ counter slack) and counter staleness over the window
    for (uint32_t s = 0; s < v.coverer_lcov.size(); ++s) {
      const auto [j_min, j_max] = v.ctr_window(s);
      const double cost = v.coverer_cost[s];
      for (Level j = j_min; j <= j_max; ++j) {
        const int64_t exact = v.ctr_exact(s, j);
        const int64_t approx = v.ctr_approx(s, j);
        const double allowed = v.strict ? 0.0 : p.eps * bt.pow(j);
        if (std::abs(static_cast<double>(exact - approx)) > allowed + 1e-9)
          out.push_back({Violation::kCounterStaleness, step,
                         "set " + std::to_string(s) + " level " +
                             std::to_string(j) + ": approx " +
                             std::to_string(approx) + " vs exact " +
                             std::to_string(exact)});
        if (j > v.coverer_lcov[s]) {
          const double thr = cost * bt.pow(j + 1) + slack * bt.pow(j);
          if (lt_tol(thr, static_cast<double>(exact)))
            out.push_back({Violation::kInv1, step,
                           "set " + std::to_string(s) + " is " +
                               std::to_string(j) + "-PD: N=" +
                               std::to_string(exact) + " thr=" +
                               std::to_string(thr)});
        }
      }
    }

    // Invariant 2 at quiescence (same expression the engine's trigger uses)
    if (!v.pairs.empty() &&
        v.ledger->total_dirt() >=
            (p.eps / p.beta) * v.ledger->total_cost())
      out.push_back({Violation::kInv2, step,
                     "dirty at quiescence: D=" +
                         std::to_string(v.ledger->total_dirt()) + " C=" +
                         std::to_string(v.ledger->total_cost())});

    // fresh pairs in the level window of their creation ratio
    for (const PairCreated& f : v.fresh_pairs) {
      const double cost = v.coverer_cost[f.set];
      const double lo = cost * bt.pow(f.level);
      const double hi = cost * bt.pow(f.level + 1) +
                        (f.origin == 'r' ? slack * bt.pow(f.level) : 0.0);
      if (lt_tol(static_cast<double>(f.size), lo) ||
          lt_tol(hi, static_cast<double>(f.size)))
        out.push_back({Violation::kCleandom, step,
                       "fresh pair set " + std::to_string(f.set) + " level " +
                           std::to_string(f.level) + " size " +
                           std::to_string(f.size)});
    }

    // per-pair upper bound |Cov| < c * beta^{l+2} (+slack)
    for (const PairView& pv : v.pairs) {
      const double thr =
          pv.cost * bt.pow(pv.lcov + 2) + slack * bt.pow(pv.lcov + 1);
      if (lt_tol(thr, static_cast<double>(pv.members.size())))
        out.push_back({Violation::kPairUpper, step,
                       "pair " + std::to_string(pv.set) + " at " +
                           std::to_string(pv.lcov) + " holds " +
                           std::to_string(pv.members.size())});
    }

    // ledger reconstruction
    for (Level j = 0; j <= v.ledger->top(); ++j) {
      const size_t sj = static_cast<size_t>(j);
      const double dj = v.ledger->dirt(j);
      auto rel_bad = [](double a, double b) {
        return std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b));
      };
      bool bad = false;
      if (v.ledger->logging_enabled() &&
          (rel_bad(dj, d_initial_[sj]) ||
           v.ledger->departures(j) != e_initial_[sj]))
        bad = true;
      if (rel_bad(v.ledger->cost(j), level_cost[sj]) ||
          v.ledger->sets(j) != level_sets[sj] ||
          v.ledger->covered(j) != level_items[sj])
        bad = true;
      if (std::abs(dj * bt.pow(j) -
                   static_cast<double>(v.ledger->departures(j))) > 1e-6)
        bad = true;
      if (bad)
        out.push_back({Violation::kLedgerDrift, step,
                       "level " + std::to_string(j) + ": D=" + std::to_string(dj) +
                           "/" + std::to_string(d_initial_[sj]) + " E=" +
                           std::to_string(v.ledger->departures(j)) + "/" +
                           std::to_string(e_initial_[sj]) + " C=" +
                           std::to_string(v.ledger->cost(j)) + "/" +
                           std::to_string(level_cost[sj])});
    }
    return out;
  }

 private:
  void fold_log(const LevelLedger& ledger, const BetaTable& bt) {
    const auto& log = ledger.log();
    for (; log_pos_ < log.size(); ++log_pos_) {
      const DepartureEvent& ev = log[log_pos_];
      if (ev.kind == DepartureEvent::kDeparture) {
        const double d = 1.0 / bt.pow(ev.level);
        d_all_[static_cast<size_t>(ev.level)] += d;
        if (ev.initial) {
          d_initial_[static_cast<size_t>(ev.level)] += d;
          e_initial_[static_cast<size_t>(ev.level)] += 1;
        }
      } else {
        for (Level j = 0; j <= ev.level; ++j) {
          d_initial_[static_cast<size_t>(j)] = 0.0;
          d_all_[static_cast<size_t>(j)] = 0.0;
          e_initial_[static_cast<size_t>(j)] = 0;
        }
      }
    }
  }

  size_t log_pos_ = 0;
  std::vector<double> d_initial_;
  std::vector<double> d_all_;
  std::vector<int64_t> e_initial_;
};

}  // namespace dsc
