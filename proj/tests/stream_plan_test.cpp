#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "streamsched/error.hpp"
#include "streamsched/generators.hpp"
#include "streamsched/graph_io.hpp"
#include "streamsched/launch_order.hpp"
#include "streamsched/plan_cost.hpp"
#include "streamsched/stream_plan.hpp"
#include "test_support.hpp"

namespace streamsched {
namespace {

using testing::ample_config;
using testing::diamond_graph;
using testing::uniform_graph;

const std::filesystem::path kData = STREAMSCHED_TEST_DATA;

using Assignment = std::map<NodeId, StreamId>;

// Literal transcription of the greedy allocator working on ids only: topo
// order by repeated min-id selection, flags per node.
Assignment reference_allocation(const ComputationGraph& g) {
  std::map<NodeId, std::set<NodeId>> preds;
  for (const auto& n : g.nodes()) preds[n.id];
  for (const auto& e : g.edges()) preds[e.to].insert(e.from);

  Assignment out;
  std::map<NodeId, bool> sync;
  StreamId next = 0;
  while (out.size() < g.size()) {
    NodeId pick = -1;
    for (const auto& [id, ps] : preds) {
      if (out.count(id)) continue;
      if (std::all_of(ps.begin(), ps.end(), [&](NodeId p) { return out.count(p) > 0; })) {
        pick = id;
        break;
      }
    }
    StreamId s = -1;
    for (NodeId p : preds[pick]) {
      if (!sync[p]) {
        sync[p] = true;
        s = out[p];
        break;
      }
    }
    out[pick] = s >= 0 ? s : next++;
  }
  return out;
}

TEST(AllocateStreams, SingleNode) {
  auto plan = allocate_streams(uniform_graph(1, {}));
  EXPECT_EQ(plan.num_streams, 1);
  EXPECT_TRUE(plan.sync_events.empty());
}

TEST(AllocateStreams, Fork) {
  auto plan = allocate_streams(uniform_graph(4, {{1, 2}, {1, 3}, {1, 4}}));
  EXPECT_EQ(plan.assignment, (Assignment{{1, 0}, {2, 0}, {3, 1}, {4, 2}}));
  EXPECT_EQ(plan.num_streams, 3);
  EXPECT_EQ(plan.sync_events, (std::vector<Edge>{{1, 3}, {1, 4}}));
}

TEST(AllocateStreams, Diamond) {
  auto plan = allocate_streams(diamond_graph());
  EXPECT_EQ(plan.assignment, (Assignment{{1, 0}, {2, 0}, {3, 1}, {4, 0}}));
  EXPECT_EQ(plan.num_streams, 2);
  EXPECT_EQ(plan.sync_events, (std::vector<Edge>{{1, 3}, {3, 4}}));
}

class PlacementCases : public ::testing::Test {
 protected:
  void SetUp() override {
    g = load_graph(kData / "placement_example.json");
    plan = allocate_streams(g);
  }
  ComputationGraph g;
  StreamPlan plan;
};

TEST_F(PlacementCases, NoPredecessorOpensNewStream) {
  EXPECT_EQ(plan.stream_of(1), 0);
  EXPECT_EQ(plan.num_streams, 5);
}

TEST_F(PlacementCases, SinglePredecessorSingleSuccessorSharesStream) {
  EXPECT_EQ(plan.stream_of(5), plan.stream_of(2));
  EXPECT_EQ(plan.stream_of(6), plan.stream_of(3));
  EXPECT_EQ(plan.stream_of(7), plan.stream_of(4));
}

TEST_F(PlacementCases, FirstSuccessorKeepsStreamLaterOnesGetNewStreams) {
  EXPECT_EQ(plan.stream_of(2), 0);
  EXPECT_EQ(plan.stream_of(3), 1);
  EXPECT_EQ(plan.stream_of(4), 2);
  EXPECT_EQ(plan.stream_of(9), plan.stream_of(8));
  EXPECT_EQ(plan.stream_of(10), 3);
  EXPECT_EQ(plan.stream_of(11), plan.stream_of(9));
  EXPECT_EQ(plan.stream_of(12), 4);
}

TEST_F(PlacementCases, MultiPredecessorJoinsFirstUnflaggedPredecessor) {
  EXPECT_EQ(plan.stream_of(8), plan.stream_of(5));
  // 10 only feeds 13 and is the lowest-id predecessor, so 13 takes its stream.
  EXPECT_EQ(plan.stream_of(13), plan.stream_of(10));
  EXPECT_EQ(plan.sync_events,
            (std::vector<Edge>{{1, 3}, {1, 4}, {6, 8}, {7, 8}, {8, 10}, {9, 12}, {11, 13}, {12, 13}}));
}

TEST(AllocateStreams, SkipsFlaggedPredecessor) {
  // 1 hands its stream to 2, so 3 (preds 1 and 2) must take 2's stream even
  // though 1 has the lower id.
  auto plan = allocate_streams(uniform_graph(3, {{1, 2}, {1, 3}, {2, 3}}));
  EXPECT_EQ(plan.assignment, (Assignment{{1, 0}, {2, 0}, {3, 0}}));
  EXPECT_TRUE(plan.sync_events.empty());

  auto plan2 = allocate_streams(uniform_graph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4}}));
  // 2 takes S0 (flags 1), 3 opens S1, 4 takes 2's stream (flags 2).
  EXPECT_EQ(plan2.assignment, (Assignment{{1, 0}, {2, 0}, {3, 1}, {4, 0}}));
  auto plan3 = allocate_streams(uniform_graph(4, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {1, 4}}));
  // 2←1 (flag 1), 3←2 (flag 2), 4: preds 1,2 both flagged → S1.
  EXPECT_EQ(plan3.assignment, (Assignment{{1, 0}, {2, 0}, {3, 0}, {4, 1}}));
}

TEST(AllocateStreams, Properties) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto g = gen_graph(gen::RandomDag{.n = 1 + static_cast<int>(seed % 40),
                                            .max_width = 1 + static_cast<int>(seed % 6), .seed = seed});
    const auto plan = allocate_streams(g);
    SCOPED_TRACE("seed " + std::to_string(seed));
    EXPECT_EQ(plan.assignment, reference_allocation(g));
    EXPECT_TRUE(validate_plan(g, plan).empty());
    EXPECT_EQ(plan.sync_events, cross_stream_edges(g, plan.assignment));

    // Each stream is a path in g: consecutive members in topo order are joined
    // by an edge, which is what makes same-stream edges sync-free.
    std::map<StreamId, std::vector<NodeId>> members;
    for (auto id : topo_sort(g)) members[plan.stream_of(id)].push_back(id);
    ASSERT_EQ(static_cast<StreamId>(members.size()), plan.num_streams);
    std::set<Edge> edges(g.edges().begin(), g.edges().end());
    for (const auto& [s, ids] : members) {
      for (std::size_t i = 1; i < ids.size(); ++i) EXPECT_TRUE(edges.count({ids[i - 1], ids[i]}));
    }
    // Every root opens a stream.
    std::set<StreamId> root_streams;
    for (const auto& n : g.nodes()) {
      if (g.predecessors(n.id).empty()) root_streams.insert(plan.stream_of(n.id));
    }
    EXPECT_EQ(root_streams.size(),
              static_cast<std::size_t>(std::count_if(g.nodes().begin(), g.nodes().end(), [&](const auto& n) {
                return g.predecessors(n.id).empty();
              })));
  }
}

TEST(AllocateStreams, ChainAndForkCounts) {
  for (int n = 1; n <= 20; ++n) {
    auto plan = allocate_streams(gen_graph(gen::Chain{n}));
    EXPECT_EQ(plan.num_streams, 1);
    EXPECT_TRUE(plan.sync_events.empty());
  }
  for (int k = 1; k <= 20; ++k) {
    auto plan = allocate_streams(gen_graph(gen::Fork{k}));
    EXPECT_EQ(plan.num_streams, k);
    EXPECT_EQ(plan.sync_events.size(), static_cast<std::size_t>(k - 1));
  }
}

TEST(ValidatePlan, ReportsEachViolation) {
  const auto g = diamond_graph();
  auto kinds = [&](const StreamPlan& p) {
    std::vector<PlanViolation::Kind> out;
    for (const auto& v : validate_plan(g, p)) out.push_back(v.kind);
    return out;
  };
  using K = PlanViolation::Kind;

  auto plan = allocate_streams(g);
  EXPECT_TRUE(validate_plan(g, plan).empty());

  auto missing = plan;
  missing.assignment.erase(4);
  missing.sync_events = {{1, 3}};
  auto v = validate_plan(g, missing);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, K::UnassignedNode);
  EXPECT_EQ(v.front().message, "node 4 unassigned");

  auto nosync = plan;
  nosync.sync_events = {{1, 3}};
  EXPECT_EQ(kinds(nosync), std::vector<K>{K::MissingSync});
  EXPECT_EQ(validate_plan(g, nosync).front().message, "missing sync for cross-stream edge (3,4)");

  auto extra = plan;
  extra.sync_events.push_back({1, 2});
  std::sort(extra.sync_events.begin(), extra.sync_events.end());
  EXPECT_EQ(kinds(extra), std::vector<K>{K::SpuriousSync});

  auto unknown = plan;
  unknown.assignment[9] = 0;
  EXPECT_EQ(kinds(unknown), std::vector<K>{K::UnknownNode});

  auto range = plan;
  range.assignment[4] = 5;
  range.sync_events = cross_stream_edges(g, range.assignment);
  EXPECT_EQ(kinds(range), std::vector<K>{K::StreamOutOfRange});

  auto empty = plan;
  empty.num_streams = 3;
  EXPECT_EQ(kinds(empty), std::vector<K>{K::EmptyStream});
}

TEST(PlanJson, RoundTrip) {
  const auto g = load_graph(kData / "placement_example.json");
  const auto plan = allocate_streams(g);
  const auto order = order_opara(g, ample_config());
  const auto parsed = plan_from_json(nlohmann::json::parse(plan_to_json(plan, order.order).dump()));
  EXPECT_EQ(parsed.plan, plan);
  for (const auto& [s, ids] : parsed.stream_order) {
    std::vector<NodeId> expect;
    for (auto id : order.order) {
      if (plan.stream_of(id) == s) expect.push_back(id);
    }
    EXPECT_EQ(ids, expect);
  }
}

TEST(PlanJson, RejectsDuplicatesAndGarbage) {
  EXPECT_THROW(plan_from_json(nlohmann::json::parse(R"({"streams":{"0":[1,2],"1":[2]},"sync":[]})")),
               ConstraintViolation);
  EXPECT_THROW(plan_from_json(nlohmann::json::parse(R"({"streams":[1,2]})")), ParseError);
  EXPECT_THROW(plan_from_json(nlohmann::json::parse(R"({"streams":{"x":[1]},"sync":[]})")), ParseError);
}

TEST(EvaluatePlan, ChainHasNoGain) {
  const auto g = uniform_graph(3, {{1, 2}, {2, 3}});
  const auto plan = allocate_streams(g);
  const auto cost = evaluate_plan(g, plan, order_opara(g, ample_config()), ample_config());
  EXPECT_DOUBLE_EQ(cost.h, 1.0);
  EXPECT_EQ(cost.sync_count, 0u);
  EXPECT_DOUBLE_EQ(cost.t_inf_us, cost.t_seq_us);
}

TEST(EvaluatePlan, ForkOfTwo) {
  const auto g = uniform_graph(3, {{1, 2}, {1, 3}});
  const auto cfg = ample_config();
  const auto cost = evaluate_plan(g, allocate_streams(g), order_opara(g, cfg), cfg, 0.0);
  EXPECT_DOUBLE_EQ(cost.t_seq_us, 30.0);
  EXPECT_DOUBLE_EQ(cost.t_para_us, 20.0);
  EXPECT_DOUBLE_EQ(cost.h, 2.0 / 3.0);
  EXPECT_FALSE(cost.h_exceeds_one);
  EXPECT_DOUBLE_EQ(cost.t_inf_us, 20.0);
}

TEST(EvaluatePlan, SyncOverheadIsAdded) {
  const auto g = diamond_graph();
  const auto cfg = ample_config();
  const auto cost = evaluate_plan(g, allocate_streams(g), order_opara(g, cfg), cfg, 5.0);
  EXPECT_EQ(cost.sync_count, 2u);
  EXPECT_DOUBLE_EQ(cost.t_para_us, 30.0);
  EXPECT_DOUBLE_EQ(cost.t_inf_us, 40.0);
}

TEST(EvaluatePlan, RejectsBrokenPlans) {
  const auto g = diamond_graph();
  auto plan = allocate_streams(g);
  plan.assignment.erase(4);
  EXPECT_THROW(evaluate_plan(g, plan, order_opara(g, ample_config()), ample_config()), ConstraintViolation);
  auto bad_order = order_opara(g, ample_config());
  std::reverse(bad_order.order.begin(), bad_order.order.end());
  EXPECT_THROW(evaluate_plan(g, allocate_streams(g), bad_order, ample_config()), ConstraintViolation);
}

}  // namespace
}  // namespace streamsched
