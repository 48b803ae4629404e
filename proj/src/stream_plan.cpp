#include "streamsched/stream_plan.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "streamsched/error.hpp"

namespace streamsched {

StreamId StreamPlan::stream_of(NodeId id) const {
  auto it = assignment.find(id);
  if (it == assignment.end()) throw ConstraintViolation("node " + std::to_string(id) + " unassigned");
  return it->second;
}

StreamPlan allocate_streams(const ComputationGraph& g) {
  std::vector<std::optional<StreamId>> stream(g.size());
  std::vector<bool> donated(g.size(), false);  // SYNC flag
  StreamId next_stream = 0;

  for (auto id : topo_sort(g)) {
    const auto v = g.index_of(id);
    for (auto p : g.pred_indices(v)) {
      if (!donated[p]) {
        stream[v] = stream[p];
        donated[p] = true;
        break;
      }
    }
    if (!stream[v]) stream[v] = next_stream++;
  }

  StreamPlan plan;
  plan.num_streams = next_stream;
  for (std::size_t i = 0; i < g.size(); ++i) {
    plan.assignment.emplace_hint(plan.assignment.end(), g.at(i).id, *stream[i]);
  }
  for (const auto& e : g.edges()) {
    if (stream[g.index_of(e.from)] != stream[g.index_of(e.to)]) plan.sync_events.push_back(e);
  }
  return plan;
}

StreamPlan single_stream_plan(const ComputationGraph& g) {
  StreamPlan plan;
  plan.num_streams = g.empty() ? 0 : 1;
  for (const auto& n : g.nodes()) plan.assignment.emplace_hint(plan.assignment.end(), n.id, 0);
  return plan;
}

std::vector<Edge> cross_stream_edges(const ComputationGraph& g, const std::map<NodeId, StreamId>& assignment) {
  std::vector<Edge> out;
  for (const auto& e : g.edges()) {
    auto u = assignment.find(e.from);
    auto v = assignment.find(e.to);
    if (u != assignment.end() && v != assignment.end() && u->second != v->second) out.push_back(e);
  }
  return out;
}

std::vector<PlanViolation> validate_plan(const ComputationGraph& g, const StreamPlan& plan) {
  using Kind = PlanViolation::Kind;
  std::vector<PlanViolation> out;
  auto edge_str = [](const Edge& e) {
    return "(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")";
  };

  for (const auto& n : g.nodes()) {
    if (!plan.assignment.contains(n.id)) {
      out.push_back({Kind::UnassignedNode, "node " + std::to_string(n.id) + " unassigned"});
    }
  }
  std::vector<bool> used(static_cast<std::size_t>(std::max<StreamId>(plan.num_streams, 0)), false);
  for (const auto& [id, s] : plan.assignment) {
    if (!g.contains(id)) {
      out.push_back({Kind::UnknownNode, "node " + std::to_string(id) + " is not in the graph"});
    }
    if (s < 0 || s >= plan.num_streams) {
      out.push_back({Kind::StreamOutOfRange, "node " + std::to_string(id) + " on stream " + std::to_string(s) +
                                                 " outside 0.." + std::to_string(plan.num_streams - 1)});
    } else {
      used[static_cast<std::size_t>(s)] = true;
    }
  }
  for (std::size_t s = 0; s < used.size(); ++s) {
    if (!used[s]) out.push_back({Kind::EmptyStream, "stream " + std::to_string(s) + " has no operators"});
  }

  const auto expected = cross_stream_edges(g, plan.assignment);
  std::set<Edge> actual(plan.sync_events.begin(), plan.sync_events.end());
  for (const auto& e : expected) {
    if (!actual.contains(e)) {
      out.push_back({Kind::MissingSync, "missing sync for cross-stream edge " + edge_str(e)});
    }
  }
  std::set<Edge> wanted(expected.begin(), expected.end());
  for (const auto& e : actual) {
    if (!wanted.contains(e)) {
      out.push_back({Kind::SpuriousSync, "sync " + edge_str(e) + " is not a cross-stream edge"});
    }
  }
  if (actual.size() != plan.sync_events.size()) {
    out.push_back({Kind::SpuriousSync, "sync events contain duplicates"});
  }
  return out;
}

nlohmann::ordered_json plan_to_json(const StreamPlan& plan, std::span<const NodeId> order) {
  std::map<StreamId, std::vector<NodeId>> streams;
  if (order.empty()) {
    for (const auto& [id, s] : plan.assignment) streams[s].push_back(id);
  } else {
    for (auto id : order) streams[plan.stream_of(id)].push_back(id);
  }
  nlohmann::ordered_json doc;
  nlohmann::ordered_json streams_doc = nlohmann::ordered_json::object();
  for (const auto& [s, ids] : streams) streams_doc[std::to_string(s)] = ids;
  auto sync = nlohmann::ordered_json::array();
  for (const auto& e : plan.sync_events) sync.push_back({e.from, e.to});
  doc["streams"] = std::move(streams_doc);
  doc["sync"] = std::move(sync);
  doc["num_streams"] = plan.num_streams;
  return doc;
}

ParsedPlan plan_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("plan: top level must be an object");
  auto streams = doc.find("streams");
  if (streams == doc.end() || !streams->is_object()) throw ParseError("plan: \"streams\" must be an object");
  ParsedPlan out;
  // num_streams is optional; without it the listed streams are all there is.
  out.plan.num_streams = static_cast<StreamId>(streams->size());
  if (auto num = doc.find("num_streams"); num != doc.end()) {
    if (!num->is_number_integer()) throw ParseError("plan: \"num_streams\" must be an integer");
    out.plan.num_streams = num->get<StreamId>();
  }
  for (const auto& [key, ids] : streams->items()) {
    StreamId s = 0;
    try {
      std::size_t used = 0;
      s = static_cast<StreamId>(std::stoi(key, &used));
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ParseError("plan: stream key \"" + key + "\" is not an integer");
    }
    if (!ids.is_array()) throw ParseError("plan: stream " + key + " must list node ids");
    auto& listed = out.stream_order[s];
    for (const auto& id : ids) {
      if (!id.is_number_integer()) throw ParseError("plan: stream " + key + " lists a non-integer id");
      const auto node = id.get<NodeId>();
      if (!out.plan.assignment.emplace(node, s).second) {
        throw ConstraintViolation("plan: node " + std::to_string(node) + " assigned to more than one stream");
      }
      listed.push_back(node);
    }
  }
  if (auto sync = doc.find("sync"); sync != doc.end()) {
    if (!sync->is_array()) throw ParseError("plan: \"sync\" must be an array");
    for (const auto& e : *sync) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw ParseError("plan: sync entries must be pairs of integers");
      }
      out.plan.sync_events.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
    std::sort(out.plan.sync_events.begin(), out.plan.sync_events.end());
  }
  return out;
}

}  // namespace streamsched
