#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "streamsched/gpu_config.hpp"
#include "streamsched/graph.hpp"
#include "streamsched/plan_cost.hpp"
#include "streamsched/stream_plan.hpp"

namespace streamsched {

struct OracleResult {
  std::int64_t best_makespan_ns = 0;
  std::vector<NodeId> best_order;
  std::uint64_t orders_examined = 0;
  bool search_space_exhausted = false;

  double best_makespan_us() const { return static_cast<double>(best_makespan_ns) / 1000.0; }
};

// Exhaustive search over launch orders for a fixed plan. Linear extensions are
// produced by repeatedly taking a zero-indegree node (ascending id) and
// deleting it, so enumeration order is lexicographic and the first minimum
// found wins ties. Stops after `max_orders` simulations and reports the best
// so far with search_space_exhausted = false.
OracleResult best_order(const ComputationGraph& g, const StreamPlan& plan, const GpuConfig& cfg,
                        std::uint64_t max_orders);

struct PlanOracleResult {
  StreamPlan plan;
  OracleResult order;
  double t_inf_us = 0.0;  // best makespan + syncs * t_overhead_unit
  std::uint64_t plans_examined = 0;
  bool search_space_exhausted = false;
};

// Exhaustive search over stream assignments with at most `max_streams`
// streams, one canonical labeling per partition (streams numbered in order of
// first appearance by node id), each paired with best_order. `max_orders`
// caps the total number of simulations across all plans.
PlanOracleResult best_plan(const ComputationGraph& g, const GpuConfig& cfg, int max_streams,
                           std::uint64_t max_orders, double t_overhead_unit_us = kDefaultSyncOverheadUs);

nlohmann::ordered_json oracle_result_to_json(const OracleResult& r);
nlohmann::ordered_json plan_oracle_result_to_json(const PlanOracleResult& r);

}  // namespace streamsched
