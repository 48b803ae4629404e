#pragma once

#include <cstddef>

#include <json.hpp>

#include "streamsched/gpu_config.hpp"
#include "streamsched/graph.hpp"
#include "streamsched/launch_order.hpp"
#include "streamsched/stream_plan.hpp"

namespace streamsched {

inline constexpr double kDefaultSyncOverheadUs = 5.0;

// Latency model of a plan: t_inf = t_para + sync_count * t_overhead_unit.
struct PlanCost {
  double t_seq_us = 0.0;
  double t_para_us = 0.0;
  double h = 1.0;  // t_para / t_seq, reported as measured
  bool h_exceeds_one = false;
  std::size_t sync_count = 0;
  double t_overhead_unit_us = kDefaultSyncOverheadUs;
  double t_inf_us = 0.0;
};

// t_seq is the single-stream topo_sort makespan and t_para the makespan of
// (plan, schedule). Throws ConstraintViolation when the plan fails
// validate_plan or the schedule is not a linear extension.
PlanCost evaluate_plan(const ComputationGraph& g, const StreamPlan& plan, const LaunchSchedule& schedule,
                       const GpuConfig& cfg, double t_overhead_unit_us = kDefaultSyncOverheadUs);

nlohmann::ordered_json plan_cost_to_json(const PlanCost& cost);

}  // namespace streamsched
