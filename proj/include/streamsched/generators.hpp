#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "streamsched/graph.hpp"

namespace streamsched {

namespace gen {

struct Chain {
  int n = 1;
};

// One root with k children.
struct Fork {
  int k = 1;
};

// 1 -> {2,3} -> 4
struct Diamond {};

// Input node fanning out to `branches` parallel chains of `depth` operators,
// joined by a concat.
struct InceptionBlock {
  int branches = 1;
  int depth = 1;
};

// Layered random DAG. Every node lives on one of `max_width` lanes and depends
// on the previous node of its lane, so the graph is covered by at most
// `max_width` chains and no antichain is wider than that.
struct RandomDag {
  int n = 1;
  int max_width = 1;
  std::uint64_t seed = 0;
};

}  // namespace gen

using GeneratorSpec = std::variant<gen::Chain, gen::Fork, gen::Diamond, gen::InceptionBlock, gen::RandomDag>;

// Deterministic for a given spec. Throws ValidationError on bad parameters.
ComputationGraph gen_graph(const GeneratorSpec& spec);

// Layer of each node of a RandomDag graph in node order; exposed so tests can
// check the per-layer width bound without re-deriving the generator.
std::vector<int> random_dag_layers(const gen::RandomDag& spec);

}  // namespace streamsched
