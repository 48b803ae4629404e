#include "streamsched/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "streamsched/error.hpp"

namespace streamsched {

std::string_view to_string(OpClass c) {
  return c == OpClass::MemoryIntensive ? "memory" : "compute";
}

ComputationGraph ComputationGraph::build(std::vector<OperatorNode> nodes, std::vector<Edge> edges) {
  ComputationGraph g;
  std::sort(nodes.begin(), nodes.end(),
            [](const OperatorNode& a, const OperatorNode& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (i > 0 && nodes[i - 1].id == n.id) {
      throw ValidationError("duplicate node id " + std::to_string(n.id));
    }
    const auto& d = n.demand;
    if (d.threads_per_block < 0 || d.shared_mem_per_block < 0 || d.registers_per_thread < 0) {
      throw ValidationError("node " + std::to_string(n.id) + ": negative resource demand");
    }
    if (d.num_blocks < 1) {
      throw ValidationError("node " + std::to_string(n.id) + ": blocks must be >= 1");
    }
    if (!(n.block_duration_us > 0.0)) {
      throw ValidationError("node " + std::to_string(n.id) + ": block_duration_us must be > 0");
    }
    g.index_.emplace(n.id, i);
  }
  g.nodes_ = std::move(nodes);

  std::sort(edges.begin(), edges.end());
  g.preds_.resize(g.nodes_.size());
  g.succs_.resize(g.nodes_.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const std::string label = "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ")";
    if (i > 0 && edges[i - 1] == e) throw ValidationError("duplicate " + label);
    if (e.from == e.to) throw ValidationError("self-edge " + label);
    auto u = g.index_.find(e.from);
    auto v = g.index_.find(e.to);
    if (u == g.index_.end() || v == g.index_.end()) {
      throw ValidationError("dangling " + label + ": unknown node " +
                            std::to_string(u == g.index_.end() ? e.from : e.to));
    }
    g.succs_[u->second].push_back(v->second);
    g.preds_[v->second].push_back(u->second);
  }
  for (auto& p : g.preds_) std::sort(p.begin(), p.end());
  g.edges_ = std::move(edges);

  // Cycle check: whatever Kahn's algorithm cannot drain lies on or behind a cycle.
  std::vector<std::size_t> indeg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) indeg[i] = g.preds_[i].size();
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (indeg[i] == 0) stack.push_back(i);
  std::size_t drained = 0;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    ++drained;
    for (auto v : g.succs_[u])
      if (--indeg[v] == 0) stack.push_back(v);
  }
  if (drained != g.size()) {
    // Peel sinks off the undrained remainder so the reported node sits on a cycle
    // rather than merely downstream of one.
    std::vector<std::size_t> outdeg(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (indeg[i] == 0) continue;
      for (auto v : g.succs_[i])
        if (indeg[v] != 0) ++outdeg[i];
      if (outdeg[i] == 0) stack.push_back(i);
    }
    std::vector<bool> peeled(g.size(), false);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      peeled[v] = true;
      for (auto u : g.preds_[v])
        if (indeg[u] != 0 && --outdeg[u] == 0) stack.push_back(u);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (indeg[i] != 0 && !peeled[i]) {
        throw ValidationError("cycle through node " + std::to_string(g.nodes_[i].id));
      }
    }
  }
  return g;
}

std::size_t ComputationGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown node id " + std::to_string(id));
  return it->second;
}

std::vector<NodeId> ComputationGraph::predecessors(NodeId id) const {
  std::vector<NodeId> out;
  for (auto i : preds_[index_of(id)]) out.push_back(nodes_[i].id);
  return out;
}

std::vector<NodeId> ComputationGraph::successors(NodeId id) const {
  std::vector<NodeId> out;
  for (auto i : succs_[index_of(id)]) out.push_back(nodes_[i].id);
  return out;
}

std::vector<NodeId> topo_sort(const ComputationGraph& g) {
  std::vector<std::size_t> indeg(g.size());
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < g.size(); ++i) {
    indeg[i] = g.pred_indices(i).size();
    if (indeg[i] == 0) ready.push(i);
  }
  std::vector<NodeId> order;
  order.reserve(g.size());
  while (!ready.empty()) {
    auto u = ready.top();
    ready.pop();
    order.push_back(g.at(u).id);
    for (auto v : g.succ_indices(u))
      if (--indeg[v] == 0) ready.push(v);
  }
  return order;
}

bool is_linear_extension(const ComputationGraph& g, std::span<const NodeId> order) {
  if (order.size() != g.size()) return false;
  std::vector<std::size_t> position(g.size(), g.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!g.contains(order[k])) return false;
    auto i = g.index_of(order[k]);
    if (position[i] != g.size()) return false;
    position[i] = k;
  }
  for (const auto& e : g.edges()) {
    if (position[g.index_of(e.from)] > position[g.index_of(e.to)]) return false;
  }
  return true;
}

double critical_path_us(const ComputationGraph& g) {
  std::vector<double> finish(g.size(), 0.0);
  double best = 0.0;
  for (auto id : topo_sort(g)) {
    auto i = g.index_of(id);
    double start = 0.0;
    for (auto p : g.pred_indices(i)) start = std::max(start, finish[p]);
    finish[i] = start + g.at(i).block_duration_us;
    best = std::max(best, finish[i]);
  }
  return best;
}

}  // namespace streamsched
