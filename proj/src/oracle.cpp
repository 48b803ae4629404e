#include "streamsched/oracle.hpp"

#include <limits>

#include "streamsched/error.hpp"
#include "streamsched/simulator.hpp"

namespace streamsched {
namespace {

class OrderSearch {
 public:
  OrderSearch(const ComputationGraph& g, const StreamPlan& plan, const GpuConfig& cfg, std::uint64_t budget)
      : g_(g), plan_(plan), cfg_(cfg), budget_(budget), indeg_(g.size()), placed_(g.size(), false) {
    for (std::size_t i = 0; i < g.size(); ++i) indeg_[i] = g.pred_indices(i).size();
    result_.best_makespan_ns = std::numeric_limits<std::int64_t>::max();
  }

  OracleResult run() {
    result_.search_space_exhausted = extend();
    if (result_.orders_examined == 0) result_.best_makespan_ns = 0;
    return result_;
  }

 private:
  // Returns false once the budget stops the search.
  bool extend() {
    if (prefix_.size() == g_.size()) {
      if (result_.orders_examined == budget_) return false;
      ++result_.orders_examined;
      const auto makespan = simulate(g_, plan_, prefix_, cfg_).makespan_ns;
      if (makespan < result_.best_makespan_ns) {
        result_.best_makespan_ns = makespan;
        result_.best_order = prefix_;
      }
      return true;
    }
    for (std::size_t v = 0; v < g_.size(); ++v) {
      if (placed_[v] || indeg_[v] != 0) continue;
      placed_[v] = true;
      prefix_.push_back(g_.at(v).id);
      for (auto s : g_.succ_indices(v)) --indeg_[s];
      const bool more = extend();
      for (auto s : g_.succ_indices(v)) ++indeg_[s];
      prefix_.pop_back();
      placed_[v] = false;
      if (!more) return false;
    }
    return true;
  }

  const ComputationGraph& g_;
  const StreamPlan& plan_;
  const GpuConfig& cfg_;
  std::uint64_t budget_;
  std::vector<std::size_t> indeg_;
  std::vector<bool> placed_;
  std::vector<NodeId> prefix_;
  OracleResult result_;
};

}  // namespace

OracleResult best_order(const ComputationGraph& g, const StreamPlan& plan, const GpuConfig& cfg,
                        std::uint64_t max_orders) {
  check_feasible(g, cfg);
  if (auto violations = validate_plan(g, plan); !violations.empty()) {
    throw ConstraintViolation("invalid stream plan: " + violations.front().message);
  }
  return OrderSearch(g, plan, cfg, max_orders).run();
}

PlanOracleResult best_plan(const ComputationGraph& g, const GpuConfig& cfg, int max_streams,
                           std::uint64_t max_orders, double t_overhead_unit_us) {
  if (max_streams < 1) throw InputError("best_plan: max_streams must be >= 1");
  check_feasible(g, cfg);

  PlanOracleResult best;
  best.t_inf_us = std::numeric_limits<double>::infinity();
  best.search_space_exhausted = true;
  std::uint64_t budget = max_orders;

  const auto n = g.size();
  std::vector<StreamId> labels(n, 0);
  // Restricted growth strings: labels[i] <= max(labels[0..i)) + 1.
  auto evaluate = [&]() -> bool {
    StreamPlan plan;
    StreamId used = 0;
    for (std::size_t i = 0; i < n; ++i) {
      plan.assignment.emplace_hint(plan.assignment.end(), g.at(i).id, labels[i]);
      used = std::max<StreamId>(used, labels[i] + 1);
    }
    plan.num_streams = used;
    plan.sync_events = cross_stream_edges(g, plan.assignment);
    auto r = OrderSearch(g, plan, cfg, budget).run();
    budget -= r.orders_examined;
    if (r.orders_examined > 0) {
      ++best.plans_examined;
      const double t_inf =
          r.best_makespan_us() + static_cast<double>(plan.sync_events.size()) * t_overhead_unit_us;
      if (t_inf < best.t_inf_us) {
        best.t_inf_us = t_inf;
        best.plan = std::move(plan);
        best.order = std::move(r);
      }
    }
    return r.search_space_exhausted;
  };

  if (n == 0) {
    best.t_inf_us = 0.0;
    best.order.search_space_exhausted = true;
    return best;
  }

  std::vector<StreamId> prefix_max(n, 0);
  std::size_t i = 1;
  while (true) {
    if (i == n) {
      if (!evaluate()) {
        best.search_space_exhausted = false;
        break;
      }
      // Advance to the next restricted growth string.
      std::size_t j = n - 1;
      while (j > 0 && (labels[j] == prefix_max[j - 1] + 1 || labels[j] + 1 >= max_streams)) --j;
      if (j == 0) break;
      ++labels[j];
      prefix_max[j] = std::max(prefix_max[j - 1], labels[j]);
      for (std::size_t k = j + 1; k < n; ++k) {
        labels[k] = 0;
        prefix_max[k] = prefix_max[k - 1];
      }
      continue;
    }
    labels[i] = 0;
    prefix_max[i] = prefix_max[i - 1];
    ++i;
  }
  return best;
}

nlohmann::ordered_json oracle_result_to_json(const OracleResult& r) {
  nlohmann::ordered_json doc;
  doc["best_makespan_ns"] = r.best_makespan_ns;
  doc["best_makespan_us"] = r.best_makespan_us();
  doc["best_order"] = r.best_order;
  doc["orders_examined"] = r.orders_examined;
  doc["search_space_exhausted"] = r.search_space_exhausted;
  return doc;
}

nlohmann::ordered_json plan_oracle_result_to_json(const PlanOracleResult& r) {
  nlohmann::ordered_json doc;
  doc["t_inf_us"] = r.t_inf_us;
  doc["plans_examined"] = r.plans_examined;
  doc["search_space_exhausted"] = r.search_space_exhausted;
  doc["plan"] = plan_to_json(r.plan, r.order.best_order);
  doc["order"] = oracle_result_to_json(r.order);
  return doc;
}

}  // namespace streamsched
