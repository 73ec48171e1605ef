#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dsc/ledger.hpp"
#include "dsc/level_arith.hpp"
#include "dsc/report.hpp"

namespace dsc {

struct PairView {
  uint32_t set = 0;
  double cost = 0.0;
  Level lcov = 0;
  std::vector<std::pair<uint32_t, bool>> members;  // (item, initial)
};

// Read-only snapshot of everything the invariant checker needs. Both the
// main engines and the exact-counter reference engine produce one, so a
// single checker serves all of them.
struct StateView {
  const Params* params = nullptr;
  const BetaTable* bt = nullptr;
  const LevelLedger* ledger = nullptr;
  bool strict = false;  // counters are exact; check without slack
  int64_t active_items = 0;

  std::vector<Level> coverer_lcov;
  std::vector<double> coverer_cost;
  std::vector<PairView> pairs;  // covering coverers, ascending id

  std::vector<char> item_active;
  std::vector<Level> item_level;
  std::vector<int64_t> item_owner;  // -1 when uncovered
  std::vector<std::vector<uint32_t>> families;  // filled for active items

  std::function<std::pair<Level, Level>(uint32_t)> ctr_window;
  std::function<int64_t(uint32_t, Level)> ctr_approx;
  std::function<int64_t(uint32_t, Level)> ctr_exact;

  std::vector<PairCreated> fresh_pairs;  // created by the step under check
};

}  // namespace dsc
