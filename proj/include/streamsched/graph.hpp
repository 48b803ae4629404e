#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace streamsched {

using NodeId = std::int64_t;
using StreamId = std::int32_t;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class OpClass { ComputeIntensive, MemoryIntensive };

std::string_view to_string(OpClass c);

// Per-block resource demand. All blocks of one operator are identical, so a
// single record describes the whole grid.
struct ResourceDemand {
  std::int64_t threads_per_block = 0;
  std::int64_t shared_mem_per_block = 0;  // bytes
  std::int64_t registers_per_thread = 0;
  std::int64_t num_blocks = 1;

  std::int64_t registers_per_block() const { return registers_per_thread * threads_per_block; }

  friend bool operator==(const ResourceDemand&, const ResourceDemand&) = default;
};

struct OperatorNode {
  NodeId id = 0;
  std::string name;
  OpClass op_class = OpClass::ComputeIntensive;
  ResourceDemand demand;
  double block_duration_us = 0.0;  // one block at full speed

  friend bool operator==(const OperatorNode&, const OperatorNode&) = default;
};

// Immutable validated DAG. Nodes are stored sorted by id, so node index order
// and ascending-id order coincide; adjacency lists are sorted the same way.
class ComputationGraph {
 public:
  ComputationGraph() = default;

  // Validates ids, edge endpoints, duplicates, self-edges, per-node demands
  // and acyclicity. Throws ValidationError naming the offending element.
  static ComputationGraph build(std::vector<OperatorNode> nodes, std::vector<Edge> edges);

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::span<const OperatorNode> nodes() const { return nodes_; }
  // Sorted lexicographically by (from, to).
  std::span<const Edge> edges() const { return edges_; }

  bool contains(NodeId id) const { return index_.contains(id); }
  // Throws ValidationError for unknown ids.
  std::size_t index_of(NodeId id) const;
  const OperatorNode& node(NodeId id) const { return nodes_[index_of(id)]; }
  const OperatorNode& at(std::size_t index) const { return nodes_[index]; }

  // Ascending node id. Throws ValidationError for unknown ids.
  std::vector<NodeId> predecessors(NodeId id) const;
  std::vector<NodeId> successors(NodeId id) const;

  // Index-based adjacency for the algorithms; ascending index (= ascending id).
  std::span<const std::size_t> pred_indices(std::size_t index) const { return preds_[index]; }
  std::span<const std::size_t> succ_indices(std::size_t index) const { return succs_[index]; }

 private:
  std::vector<OperatorNode> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
};

// Kahn's algorithm with the smallest ready id first.
std::vector<NodeId> topo_sort(const ComputationGraph& g);

// True iff `order` lists every node exactly once and respects every edge.
bool is_linear_extension(const ComputationGraph& g, std::span<const NodeId> order);

// Longest dependency chain weighted by block_duration_us; the contention-free
// lower bound on any schedule's makespan.
double critical_path_us(const ComputationGraph& g);

}  // namespace streamsched
