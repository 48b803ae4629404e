#include "streamsched/plan_cost.hpp"

#include "streamsched/error.hpp"
#include "streamsched/simulator.hpp"

namespace streamsched {

PlanCost evaluate_plan(const ComputationGraph& g, const StreamPlan& plan, const LaunchSchedule& schedule,
                       const GpuConfig& cfg, double t_overhead_unit_us) {
  if (auto violations = validate_plan(g, plan); !violations.empty()) {
    std::string msg = "plan violates the one-stream-per-operator constraint:";
    for (const auto& v : violations) msg += " " + v.message + ";";
    throw ConstraintViolation(msg);
  }
  if (!(t_overhead_unit_us >= 0.0)) throw InputError("sync overhead must be >= 0");

  PlanCost cost;
  cost.t_seq_us = static_cast<double>(sequential_makespan_ns(g, cfg)) / 1000.0;
  cost.t_para_us = simulate(g, plan, schedule, cfg).makespan_us();
  cost.h = cost.t_seq_us > 0.0 ? cost.t_para_us / cost.t_seq_us : 1.0;
  cost.h_exceeds_one = cost.h > 1.0;
  cost.sync_count = plan.sync_events.size();
  cost.t_overhead_unit_us = t_overhead_unit_us;
  cost.t_inf_us = cost.t_para_us + static_cast<double>(cost.sync_count) * t_overhead_unit_us;
  return cost;
}

nlohmann::ordered_json plan_cost_to_json(const PlanCost& cost) {
  nlohmann::ordered_json doc;
  doc["t_seq_us"] = cost.t_seq_us;
  doc["t_para_us"] = cost.t_para_us;
  doc["h"] = cost.h;
  doc["h_exceeds_one"] = cost.h_exceeds_one;
  doc["sync_count"] = cost.sync_count;
  doc["t_overhead_unit_us"] = cost.t_overhead_unit_us;
  doc["t_inf_us"] = cost.t_inf_us;
  return doc;
}

}  // namespace streamsched
