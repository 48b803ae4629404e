#include "streamsched/generators.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <string>

#include "streamsched/error.hpp"
#include "streamsched/op_class.hpp"

namespace streamsched {
namespace {

OperatorNode make_node(NodeId id, std::string name, std::int64_t blocks, double duration_us,
                       std::int64_t shared_mem = 0) {
  OperatorNode n;
  n.id = id;
  n.op_class = classify(name).op_class;
  n.name = std::move(name);
  n.demand = {.threads_per_block = 256,
              .shared_mem_per_block = shared_mem,
              .registers_per_thread = 32,
              .num_blocks = blocks};
  n.block_duration_us = duration_us;
  return n;
}

// std::uniform_int_distribution is implementation-defined; generated files must
// match across standard libraries, so draw from the raw engine instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

ComputationGraph chain(const gen::Chain& s) {
  if (s.n < 1) throw ValidationError("chain: n must be >= 1");
  std::vector<OperatorNode> nodes;
  std::vector<Edge> edges;
  for (int i = 1; i <= s.n; ++i) {
    nodes.push_back(make_node(i, i % 2 == 1 ? "conv" : "relu", 1, 10.0));
    if (i > 1) edges.push_back({i - 1, i});
  }
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

ComputationGraph fork(const gen::Fork& s) {
  if (s.k < 1) throw ValidationError("fork: k must be >= 1");
  std::vector<OperatorNode> nodes{make_node(1, "conv", 1, 10.0)};
  std::vector<Edge> edges;
  for (int i = 2; i <= s.k + 1; ++i) {
    nodes.push_back(make_node(i, i % 2 == 0 ? "relu" : "conv", 1, 10.0));
    edges.push_back({1, i});
  }
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

ComputationGraph diamond() {
  return ComputationGraph::build(
      {make_node(1, "conv", 1, 10.0), make_node(2, "relu", 1, 10.0), make_node(3, "conv", 1, 10.0),
       make_node(4, "add", 1, 10.0)},
      {{1, 2}, {1, 3}, {2, 4}, {3, 4}});
}

ComputationGraph inception(const gen::InceptionBlock& s) {
  if (s.branches < 1 || s.depth < 1) throw ValidationError("inception: branches and depth must be >= 1");
  std::vector<OperatorNode> nodes{make_node(1, "conv", 16, 10.0, 16 * 1024)};
  std::vector<Edge> edges;
  NodeId next = 2;
  std::vector<NodeId> tails;
  for (int b = 0; b < s.branches; ++b) {
    NodeId prev = 1;
    for (int j = 0; j < s.depth; ++j) {
      const bool is_conv = j % 2 == 0;
      nodes.push_back(make_node(next, is_conv ? "conv" : "relu", 8 * (b + 1), 10.0 + 5.0 * b,
                                is_conv ? 16 * 1024 : 0));
      edges.push_back({prev, next});
      prev = next++;
    }
    tails.push_back(prev);
  }
  nodes.push_back(make_node(next, "concat", 4, 5.0));
  for (auto t : tails) edges.push_back({t, next});
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

struct RandomLayout {
  std::vector<int> layer;  // per node, node k has id k + 1
  std::vector<Edge> edges;
};

RandomLayout random_layout(const gen::RandomDag& s, Rng& rng) {
  if (s.n < 1 || s.max_width < 1) throw ValidationError("random: n and max_width must be >= 1");
  RandomLayout out;
  std::vector<NodeId> lane_tail(static_cast<std::size_t>(s.max_width), 0);
  std::vector<int> lanes(static_cast<std::size_t>(s.max_width));
  std::vector<NodeId> prev_layer;
  NodeId next = 1;
  int depth = 0;
  while (next <= s.n) {
    const auto width = std::min<std::int64_t>(rng.uniform(1, s.max_width), s.n - next + 1);
    std::iota(lanes.begin(), lanes.end(), 0);
    for (std::size_t i = lanes.size() - 1; i > 0; --i) {
      std::swap(lanes[i], lanes[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i)))]);
    }
    std::sort(lanes.begin(), lanes.begin() + width);

    std::vector<NodeId> layer;
    for (std::int64_t j = 0; j < width; ++j, ++next) {
      auto& tail = lane_tail[static_cast<std::size_t>(lanes[static_cast<std::size_t>(j)])];
      if (tail != 0) out.edges.push_back({tail, next});
      if (!prev_layer.empty() && (tail == 0 || rng.uniform(0, 1) == 1)) {
        const auto extra = rng.pick(prev_layer);
        if (extra != tail) out.edges.push_back({extra, next});
      }
      tail = next;
      layer.push_back(next);
      out.layer.push_back(depth);
    }
    prev_layer = std::move(layer);
    ++depth;
  }
  return out;
}

ComputationGraph random_dag(const gen::RandomDag& s) {
  static const std::vector<std::string> kNames{"conv", "matmul", "gemm", "relu", "add", "concat", "pool"};
  static const std::vector<std::int64_t> kThreads{64, 128, 256, 512};
  static const std::vector<std::int64_t> kRegisters{16, 32, 48, 64};

  Rng rng(s.seed);
  auto layout = random_layout(s, rng);
  std::vector<OperatorNode> nodes;
  nodes.reserve(static_cast<std::size_t>(s.n));
  for (NodeId id = 1; id <= s.n; ++id) {
    OperatorNode n;
    n.id = id;
    n.name = rng.pick(kNames);
    n.op_class = classify(n.name).op_class;
    n.demand.num_blocks = rng.uniform(1, 64);
    n.demand.threads_per_block = rng.pick(kThreads);
    n.demand.shared_mem_per_block = 1024 * rng.uniform(0, 48);
    n.demand.registers_per_thread = rng.pick(kRegisters);
    n.block_duration_us = static_cast<double>(rng.uniform(5, 50));
    nodes.push_back(std::move(n));
  }
  return ComputationGraph::build(std::move(nodes), std::move(layout.edges));
}

}  // namespace

ComputationGraph gen_graph(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& s) -> ComputationGraph {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, gen::Chain>) return chain(s);
        else if constexpr (std::is_same_v<T, gen::Fork>) return fork(s);
        else if constexpr (std::is_same_v<T, gen::Diamond>) return diamond();
        else if constexpr (std::is_same_v<T, gen::InceptionBlock>) return inception(s);
        else return random_dag(s);
      },
      spec);
}

std::vector<int> random_dag_layers(const gen::RandomDag& spec) {
  Rng rng(spec.seed);
  return random_layout(spec, rng).layer;
}

}  // namespace streamsched
