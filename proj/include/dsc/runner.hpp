#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>

#include "dsc/engine_ds.hpp"
#include "dsc/engine_sc.hpp"
#include "dsc/workloads.hpp"

namespace dsc {

// One engine of either problem kind behind a uniform replay surface.
class Replayer {
 public:
  Replayer(const Workload& w, double eps, bool exact_counters = false,
           bool keep_log = true)
      : workload_(&w) {
    if (w.kind == Workload::kSetCover) {
      Params p(eps, static_cast<int64_t>(w.n), w.c_ratio);
      sc_ = std::make_unique<ScEngine>(
          SetSystem::build(w.n, w.sets, w.c_ratio), p, exact_counters,
          keep_log);
    } else {
      ds_ = std::make_unique<DsEngine>(w.vertex_costs, w.c_ratio, eps,
                                       w.f_or_delta, exact_counters, keep_log);
    }
  }

  const StepReport& apply(const Workload::Op& op) {
    if (sc_) {
      return op.op == '+' ? sc_->insert(op.a) : sc_->erase(op.a);
    }
    return op.op == '+' ? ds_->insert_edge(op.a, op.b)
                        : ds_->delete_edge(op.a, op.b);
  }

  bool is_ds() const { return ds_ != nullptr; }
  ScEngine* sc() { return sc_.get(); }
  DsEngine* ds() { return ds_.get(); }
  StateView view() const { return sc_ ? sc_->view() : ds_->view(); }
  CoverSnapshot snapshot() const { return sc_ ? sc_->snapshot() : ds_->snapshot(); }
  double cover_cost() const { return sc_ ? sc_->cover_cost() : ds_->cover_cost(); }
  const RunTotals& totals() const { return sc_ ? sc_->totals() : ds_->totals(); }
  Level ledger_top() const {
    return sc_ ? sc_->core().ledger().top() : ds_->core().ledger().top();
  }
  uint64_t refreshed_entries() const {
    return sc_ ? sc_->core().bank().total_refreshed_entries()
               : ds_->core().bank().total_refreshed_entries();
  }
  int64_t active_items() const {
    return sc_ ? sc_->core().active_items() : ds_->core().active_items();
  }

 private:
  const Workload* workload_;
  std::unique_ptr<ScEngine> sc_;
  std::unique_ptr<DsEngine> ds_;
};

}  // namespace dsc
