#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "streamsched/gpu_config.hpp"
#include "streamsched/graph.hpp"

namespace streamsched {

enum class OrderPolicy { Opara, DepthFirstTopo, Wavefront, RandomTopo, Sequential };

// CLI spellings: opara | dfs | wavefront | random | sequential.
std::string_view to_string(OrderPolicy p);
std::optional<OrderPolicy> parse_policy(std::string_view name);

// Total launch order over the graph's operators.
struct LaunchSchedule {
  std::vector<NodeId> order;
  OrderPolicy policy = OrderPolicy::Sequential;
  std::uint64_t seed = 0;  // only meaningful for RandomTopo

  friend bool operator==(const LaunchSchedule&, const LaunchSchedule&) = default;
};

// Largest fraction of one SM that a single block claims across threads,
// shared memory and registers, multiplied by the block count.
double dominant_share(const OperatorNode& node, const GpuConfig& cfg);

// Resource- and interference-aware order. Ready operators are split into a
// memory list and a compute list. Each step picks the list opposite to the one
// used last (memory first), falling back to the other list when it is empty,
// and launches that list's operator with the smallest (dominant_share, id).
LaunchSchedule order_opara(const ComputationGraph& g, const GpuConfig& cfg);

// dfs: depth-first from roots in id order, a node is emitted once all of its
//      predecessors are; wavefront: level by level, ids ascending within a
//      level; random: random linear extension (exactly uniform up to
//      kExactUniformLimit nodes, uniform choice among ready nodes above);
// sequential: topo_sort. Opara is rejected here; use order_opara.
LaunchSchedule order_baseline(const ComputationGraph& g, OrderPolicy policy, std::uint64_t seed = 0);

inline constexpr std::size_t kExactUniformLimit = 16;

nlohmann::ordered_json schedule_to_json(const LaunchSchedule& s);
// Throws ParseError on malformed documents.
LaunchSchedule schedule_from_json(const nlohmann::json& doc);

}  // namespace streamsched
