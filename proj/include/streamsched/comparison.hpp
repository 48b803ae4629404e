#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamsched/gpu_config.hpp"
#include "streamsched/graph.hpp"
#include "streamsched/launch_order.hpp"
#include "streamsched/plan_cost.hpp"
#include "streamsched/stream_plan.hpp"

namespace streamsched {

struct PolicySchedule {
  StreamPlan plan;
  LaunchSchedule schedule;
};

// sequential runs everything on one stream in topo_sort order; every other
// policy pairs allocate_streams with its own launch order.
PolicySchedule schedule_for_policy(const ComputationGraph& g, const GpuConfig& cfg, OrderPolicy policy,
                                   std::uint64_t seed = 0);

struct PolicyRow {
  std::string policy;
  StreamId num_streams = 0;
  std::size_t sync_count = 0;
  double makespan_us = 0.0;
  double t_inf_us = 0.0;
  double speedup_vs_sequential = 1.0;  // sequential makespan / makespan
  double sm_efficiency = 0.0;
  double blocked_time_us = 0.0;
};

struct ComparisonMetadata {
  std::string graph_file;
  std::string config_file;
  std::uint64_t seed = 0;
  std::string tool_version;
};

struct ComparisonReport {
  ComparisonMetadata metadata;
  double sequential_makespan_us = 0.0;
  double t_overhead_unit_us = kDefaultSyncOverheadUs;
  std::vector<PolicyRow> rows;  // in request order
};

// Throws InputError for fewer than two policies or a repeated policy.
ComparisonReport compare_policies(const ComputationGraph& g, const GpuConfig& cfg,
                                  std::span<const OrderPolicy> policies, std::uint64_t seed,
                                  double t_overhead_unit_us, ComparisonMetadata metadata);

nlohmann::ordered_json report_to_json(const ComparisonReport& report);
void print_report_table(const ComparisonReport& report, std::ostream& out);

}  // namespace streamsched
