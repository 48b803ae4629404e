#include "streamsched/comparison.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "streamsched/error.hpp"
#include "streamsched/simulator.hpp"

namespace streamsched {

PolicySchedule schedule_for_policy(const ComputationGraph& g, const GpuConfig& cfg, OrderPolicy policy,
                                   std::uint64_t seed) {
  switch (policy) {
    case OrderPolicy::Sequential:
      return {single_stream_plan(g), order_baseline(g, policy)};
    case OrderPolicy::Opara:
      return {allocate_streams(g), order_opara(g, cfg)};
    default:
      return {allocate_streams(g), order_baseline(g, policy, seed)};
  }
}

ComparisonReport compare_policies(const ComputationGraph& g, const GpuConfig& cfg,
                                  std::span<const OrderPolicy> policies, std::uint64_t seed,
                                  double t_overhead_unit_us, ComparisonMetadata metadata) {
  if (policies.size() < 2) throw InputError("compare needs at least two policies");
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (std::find(policies.begin(), policies.begin() + static_cast<std::ptrdiff_t>(i), policies[i]) !=
        policies.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw InputError("policy " + std::string(to_string(policies[i])) + " requested twice");
    }
  }

  ComparisonReport report;
  report.metadata = std::move(metadata);
  report.metadata.seed = seed;
  report.t_overhead_unit_us = t_overhead_unit_us;
  report.sequential_makespan_us = static_cast<double>(sequential_makespan_ns(g, cfg)) / 1000.0;

  for (auto policy : policies) {
    const auto ps = schedule_for_policy(g, cfg, policy, seed);
    const auto sim = simulate(g, ps.plan, ps.schedule, cfg);
    PolicyRow row;
    row.policy = std::string(to_string(policy));
    row.num_streams = ps.plan.num_streams;
    row.sync_count = ps.plan.sync_events.size();
    row.makespan_us = sim.makespan_us();
    row.t_inf_us = row.makespan_us + static_cast<double>(row.sync_count) * t_overhead_unit_us;
    row.speedup_vs_sequential = row.makespan_us > 0.0 ? report.sequential_makespan_us / row.makespan_us : 1.0;
    row.sm_efficiency = sim.sm_efficiency;
    row.blocked_time_us = static_cast<double>(sim.blocked_ns) / 1000.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::ordered_json report_to_json(const ComparisonReport& report) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta;
  meta["graph_file"] = report.metadata.graph_file;
  meta["config_file"] = report.metadata.config_file;
  meta["seed"] = report.metadata.seed;
  meta["tool_version"] = report.metadata.tool_version;
  meta["t_overhead_unit_us"] = report.t_overhead_unit_us;
  doc["metadata"] = std::move(meta);
  doc["sequential_makespan_us"] = report.sequential_makespan_us;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["policy"] = r.policy;
    row["num_streams"] = r.num_streams;
    row["sync_count"] = r.sync_count;
    row["makespan_us"] = r.makespan_us;
    row["t_inf_us"] = r.t_inf_us;
    row["speedup_vs_sequential"] = r.speedup_vs_sequential;
    row["sm_efficiency"] = r.sm_efficiency;
    row["blocked_time_us"] = r.blocked_time_us;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

void print_report_table(const ComparisonReport& report, std::ostream& out) {
  fmt::print(out, "{:<11} {:>7} {:>6} {:>13} {:>13} {:>8} {:>7} {:>12}\n", "policy", "streams", "syncs",
             "makespan_us", "t_inf_us", "speedup", "sm_eff", "blocked_us");
  for (const auto& r : report.rows) {
    fmt::print(out, "{:<11} {:>7} {:>6} {:>13.3f} {:>13.3f} {:>8.3f} {:>7.3f} {:>12.3f}\n", r.policy,
               r.num_streams, r.sync_count, r.makespan_us, r.t_inf_us, r.speedup_vs_sequential, r.sm_efficiency,
               r.blocked_time_us);
  }
}

}  // namespace streamsched
