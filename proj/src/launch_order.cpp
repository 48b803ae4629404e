#include "streamsched/launch_order.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

#include "streamsched/error.hpp"

namespace streamsched {
namespace {

std::vector<std::size_t> indegrees(const ComputationGraph& g) {
  std::vector<std::size_t> indeg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) indeg[i] = g.pred_indices(i).size();
  return indeg;
}

std::vector<NodeId> depth_first(const ComputationGraph& g) {
  auto indeg = indegrees(g);
  std::vector<NodeId> order;
  order.reserve(g.size());
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (node, next successor slot)
  for (std::size_t root = 0; root < g.size(); ++root) {
    if (!g.pred_indices(root).empty()) continue;
    order.push_back(g.at(root).id);
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [u, slot] = stack.back();
      const auto succs = g.succ_indices(u);
      if (slot == succs.size()) {
        stack.pop_back();
        continue;
      }
      const auto v = succs[slot++];
      if (--indeg[v] == 0) {
        order.push_back(g.at(v).id);
        stack.emplace_back(v, 0);
      }
    }
  }
  return order;
}

std::vector<NodeId> wavefront(const ComputationGraph& g) {
  std::vector<std::size_t> level(g.size(), 0);
  for (auto id : topo_sort(g)) {
    const auto v = g.index_of(id);
    for (auto p : g.pred_indices(v)) level[v] = std::max(level[v], level[p] + 1);
  }
  std::vector<std::size_t> idx(g.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return level[a] < level[b]; });
  std::vector<NodeId> order;
  order.reserve(g.size());
  for (auto i : idx) order.push_back(g.at(i).id);
  return order;
}

class UniformLinearExtension {
 public:
  UniformLinearExtension(const ComputationGraph& g, std::uint64_t seed) : g_(g), engine_(seed) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::uint32_t mask = 0;
      for (auto p : g.pred_indices(i)) mask |= 1u << p;
      pred_mask_.push_back(mask);
    }
  }

  std::vector<NodeId> sample() {
    std::vector<NodeId> order;
    std::uint32_t placed = 0;
    while (order.size() < g_.size()) {
      const auto total = count(placed);
      auto r = draw_below(total);
      for (std::size_t v = 0; v < g_.size(); ++v) {
        if (!ready(placed, v)) continue;
        const auto c = count(placed | (1u << v));
        if (r < c) {
          placed |= 1u << v;
          order.push_back(g_.at(v).id);
          break;
        }
        r -= c;
      }
    }
    return order;
  }

 private:
  bool ready(std::uint32_t placed, std::size_t v) const {
    return !(placed & (1u << v)) && (pred_mask_[v] & ~placed) == 0;
  }

  // Number of linear extensions of the nodes not yet placed.
  std::uint64_t count(std::uint32_t placed) {
    if (placed == full()) return 1;
    if (auto it = memo_.find(placed); it != memo_.end()) return it->second;
    std::uint64_t total = 0;
    for (std::size_t v = 0; v < g_.size(); ++v) {
      if (ready(placed, v)) total += count(placed | (1u << v));
    }
    memo_.emplace(placed, total);
    return total;
  }

  std::uint32_t full() const {
    return g_.size() == 32 ? ~0u : (1u << g_.size()) - 1;
  }

  std::uint64_t draw_below(std::uint64_t bound) {
    const auto limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  const ComputationGraph& g_;
  std::mt19937_64 engine_;
  std::vector<std::uint32_t> pred_mask_;
  std::unordered_map<std::uint32_t, std::uint64_t> memo_;
};

std::vector<NodeId> random_ready_choice(const ComputationGraph& g, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  auto indeg = indegrees(g);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (indeg[i] == 0) ready.push_back(i);
  std::vector<NodeId> order;
  order.reserve(g.size());
  while (!ready.empty()) {
    const auto k = static_cast<std::size_t>(engine() % ready.size());
    const auto u = ready[k];
    ready[k] = ready.back();
    ready.pop_back();
    order.push_back(g.at(u).id);
    for (auto v : g.succ_indices(u))
      if (--indeg[v] == 0) ready.push_back(v);
  }
  return order;
}

}  // namespace

std::string_view to_string(OrderPolicy p) {
  switch (p) {
    case OrderPolicy::Opara: return "opara";
    case OrderPolicy::DepthFirstTopo: return "dfs";
    case OrderPolicy::Wavefront: return "wavefront";
    case OrderPolicy::RandomTopo: return "random";
    case OrderPolicy::Sequential: return "sequential";
  }
  return "unknown";
}

std::optional<OrderPolicy> parse_policy(std::string_view name) {
  for (auto p : {OrderPolicy::Opara, OrderPolicy::DepthFirstTopo, OrderPolicy::Wavefront, OrderPolicy::RandomTopo,
                 OrderPolicy::Sequential}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

double dominant_share(const OperatorNode& node, const GpuConfig& cfg) {
  const auto& d = node.demand;
  const double share = std::max({static_cast<double>(d.threads_per_block) / static_cast<double>(cfg.threads_per_sm),
                                  static_cast<double>(d.shared_mem_per_block) / static_cast<double>(cfg.shared_mem_per_sm),
                                  static_cast<double>(d.registers_per_block()) / static_cast<double>(cfg.registers_per_sm)});
  return share * static_cast<double>(d.num_blocks);
}

LaunchSchedule order_opara(const ComputationGraph& g, const GpuConfig& cfg) {
  cfg.validate();
  std::vector<double> score(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) score[i] = dominant_share(g.at(i), cfg);

  // Index order equals id order, so (score, index) is the (share, id) key.
  using ReadyList = std::set<std::pair<double, std::size_t>>;
  ReadyList memory_list;
  ReadyList compute_list;
  auto list_for = [&](std::size_t v) -> ReadyList& {
    return g.at(v).op_class == OpClass::MemoryIntensive ? memory_list : compute_list;
  };

  auto indeg = indegrees(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (indeg[i] == 0) list_for(i).emplace(score[i], i);

  LaunchSchedule out{.order = {}, .policy = OrderPolicy::Opara};
  out.order.reserve(g.size());
  bool prefer_memory = true;
  while (!memory_list.empty() || !compute_list.empty()) {
    const bool take_memory = prefer_memory ? !memory_list.empty() : compute_list.empty();
    auto& list = take_memory ? memory_list : compute_list;
    prefer_memory = !take_memory;

    const auto v = list.begin()->second;
    list.erase(list.begin());
    out.order.push_back(g.at(v).id);
    for (auto s : g.succ_indices(v))
      if (--indeg[s] == 0) list_for(s).emplace(score[s], s);
  }
  return out;
}

LaunchSchedule order_baseline(const ComputationGraph& g, OrderPolicy policy, std::uint64_t seed) {
  LaunchSchedule out{.order = {}, .policy = policy, .seed = 0};
  switch (policy) {
    case OrderPolicy::DepthFirstTopo:
      out.order = depth_first(g);
      break;
    case OrderPolicy::Wavefront:
      out.order = wavefront(g);
      break;
    case OrderPolicy::RandomTopo:
      out.seed = seed;
      out.order = g.size() <= kExactUniformLimit ? UniformLinearExtension(g, seed).sample()
                                                 : random_ready_choice(g, seed);
      break;
    case OrderPolicy::Sequential:
      out.order = topo_sort(g);
      break;
    case OrderPolicy::Opara:
      throw InputError("order_baseline: opara is not a baseline policy");
  }
  return out;
}

nlohmann::ordered_json schedule_to_json(const LaunchSchedule& s) {
  nlohmann::ordered_json doc;
  doc["policy"] = std::string(to_string(s.policy));
  if (s.policy == OrderPolicy::RandomTopo) doc["seed"] = s.seed;
  doc["order"] = s.order;
  return doc;
}

LaunchSchedule schedule_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("order: top level must be an object");
  LaunchSchedule s;
  auto policy = doc.find("policy");
  if (policy == doc.end() || !policy->is_string()) throw ParseError("order: \"policy\" must be a string");
  auto p = parse_policy(policy->get<std::string>());
  if (!p) throw ParseError("order: unknown policy \"" + policy->get<std::string>() + "\"");
  s.policy = *p;
  if (auto seed = doc.find("seed"); seed != doc.end()) {
    if (!seed->is_number_unsigned()) throw ParseError("order: \"seed\" must be a non-negative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  auto order = doc.find("order");
  if (order == doc.end() || !order->is_array()) throw ParseError("order: \"order\" must be an array");
  for (const auto& id : *order) {
    if (!id.is_number_integer()) throw ParseError("order: ids must be integers");
    s.order.push_back(id.get<NodeId>());
  }
  return s;
}

}  // namespace streamsched
