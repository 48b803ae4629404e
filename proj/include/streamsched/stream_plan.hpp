#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamsched/graph.hpp"

namespace streamsched {

// Operator-to-stream assignment plus the cross-stream edges that need an
// event record/wait pair.
struct StreamPlan {
  std::map<NodeId, StreamId> assignment;
  StreamId num_streams = 0;
  std::vector<Edge> sync_events;  // sorted

  // Throws ConstraintViolation for unassigned nodes.
  StreamId stream_of(NodeId id) const;

  friend bool operator==(const StreamPlan&, const StreamPlan&) = default;
};

// Greedy stream allocation. Visits nodes in topological order; each node takes
// over the stream of its first (lowest-id) predecessor that has not yet handed
// its stream to another successor, and otherwise opens a new stream.
StreamPlan allocate_streams(const ComputationGraph& g);

// Every node on stream 0, no sync events.
StreamPlan single_stream_plan(const ComputationGraph& g);

// Edges of `g` whose endpoints sit on different streams under `assignment`.
std::vector<Edge> cross_stream_edges(const ComputationGraph& g, const std::map<NodeId, StreamId>& assignment);

struct PlanViolation {
  enum class Kind {
    UnassignedNode,
    UnknownNode,
    StreamOutOfRange,
    EmptyStream,
    MissingSync,
    SpuriousSync,
  };
  Kind kind;
  std::string message;
};

// Empty result means the plan is valid: every node on exactly one stream,
// dense stream ids, and sync_events equal to the cross-stream edge set.
std::vector<PlanViolation> validate_plan(const ComputationGraph& g, const StreamPlan& plan);

// Serialized form: {"streams":{"<sid>":[ids in launch order]},"sync":[[u,v]],"num_streams":n}.
// `order` fixes the per-stream listing; when empty, ids are listed ascending.
nlohmann::ordered_json plan_to_json(const StreamPlan& plan, std::span<const NodeId> order = {});

struct ParsedPlan {
  StreamPlan plan;
  std::map<StreamId, std::vector<NodeId>> stream_order;
};

// Throws ParseError on malformed documents and ConstraintViolation when a
// node is listed more than once.
ParsedPlan plan_from_json(const nlohmann::json& doc);

}  // namespace streamsched
