#include "streamsched/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "streamsched/error.hpp"
#include "streamsched/op_class.hpp"

namespace streamsched {
namespace {

using nlohmann::json;

std::string node_label(const json& node, std::size_t position) {
  if (node.is_object() && node.contains("id") && node["id"].is_number_integer()) {
    return "node " + std::to_string(node["id"].get<std::int64_t>());
  }
  return "nodes[" + std::to_string(position) + "]";
}

std::int64_t require_int(const json& node, const char* field, const std::string& where) {
  auto it = node.find(field);
  if (it == node.end()) throw ParseError(where + ": missing field \"" + field + "\"");
  if (!it->is_number_integer()) throw ParseError(where + ": field \"" + field + "\" must be an integer");
  return it->get<std::int64_t>();
}

double require_number(const json& node, const char* field, const std::string& where) {
  auto it = node.find(field);
  if (it == node.end()) throw ParseError(where + ": missing field \"" + field + "\"");
  if (!it->is_number()) throw ParseError(where + ": field \"" + field + "\" must be a number");
  return it->get<double>();
}

OperatorNode node_from_json(const json& node, std::size_t position, std::vector<std::string>* warnings) {
  const auto where = node_label(node, position);
  if (!node.is_object()) throw ParseError(where + ": expected an object");
  OperatorNode out;
  out.id = require_int(node, "id", where);
  auto name = node.find("name");
  if (name == node.end() || !name->is_string()) {
    throw ParseError(where + ": field \"name\" must be a string");
  }
  out.name = name->get<std::string>();
  out.demand.num_blocks = require_int(node, "blocks", where);
  out.demand.threads_per_block = require_int(node, "threads_per_block", where);
  out.demand.shared_mem_per_block = require_int(node, "shared_mem_bytes", where);
  out.demand.registers_per_thread = require_int(node, "registers_per_thread", where);
  out.block_duration_us = require_number(node, "block_duration_us", where);

  auto cls = node.find("class");
  if (cls != node.end()) {
    if (*cls == "compute") {
      out.op_class = OpClass::ComputeIntensive;
    } else if (*cls == "memory") {
      out.op_class = OpClass::MemoryIntensive;
    } else {
      throw ParseError(where + ": field \"class\" must be \"compute\" or \"memory\"");
    }
  } else {
    auto c = classify(out.name);
    out.op_class = c.op_class;
    if (!c.known && warnings) {
      warnings->push_back(where + ": unknown operator \"" + out.name + "\", assuming compute");
    }
  }
  return out;
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ComputationGraph graph_from_json(const nlohmann::json& doc, std::vector<std::string>* warnings) {
  if (!doc.is_object()) throw ParseError("graph: top level must be an object");
  auto nodes_it = doc.find("nodes");
  if (nodes_it == doc.end() || !nodes_it->is_array()) throw ParseError("graph: \"nodes\" must be an array");

  std::vector<OperatorNode> nodes;
  nodes.reserve(nodes_it->size());
  for (std::size_t i = 0; i < nodes_it->size(); ++i) {
    nodes.push_back(node_from_json((*nodes_it)[i], i, warnings));
  }

  std::vector<Edge> edges;
  if (auto edges_it = doc.find("edges"); edges_it != doc.end()) {
    if (!edges_it->is_array()) throw ParseError("graph: \"edges\" must be an array");
    for (std::size_t i = 0; i < edges_it->size(); ++i) {
      const auto& e = (*edges_it)[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw ParseError("graph: edges[" + std::to_string(i) + "] must be a pair of integers");
      }
      edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
  }
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

nlohmann::json merge_profile(nlohmann::json graph_doc, const nlohmann::json& profile_doc) {
  if (!graph_doc.is_object() || !graph_doc.contains("nodes") || !graph_doc["nodes"].is_array()) {
    throw ParseError("graph: \"nodes\" must be an array");
  }
  if (!profile_doc.is_object() || !profile_doc.contains("nodes") || !profile_doc["nodes"].is_array()) {
    throw ParseError("profile: \"nodes\" must be an array");
  }
  auto& nodes = graph_doc["nodes"];
  for (std::size_t i = 0; i < profile_doc["nodes"].size(); ++i) {
    const auto& record = profile_doc["nodes"][i];
    const auto where = "profile " + node_label(record, i);
    if (!record.is_object()) throw ParseError(where + ": expected an object");
    const auto id = require_int(record, "id", where);
    auto target = std::find_if(nodes.begin(), nodes.end(), [&](const json& n) {
      return n.is_object() && n.contains("id") && n["id"] == id;
    });
    if (target == nodes.end()) throw ValidationError(where + ": no such node in graph");
    for (const auto& [key, value] : record.items()) (*target)[key] = value;
  }
  return graph_doc;
}

ComputationGraph load_graph(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& profile,
                            std::vector<std::string>* warnings) {
  auto doc = read_json_file(path);
  if (profile) doc = merge_profile(std::move(doc), read_json_file(*profile));
  try {
    return graph_from_json(doc, warnings);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json graph_to_json(const ComputationGraph& g) {
  nlohmann::ordered_json doc;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes()) {
    nlohmann::ordered_json node;
    node["id"] = n.id;
    node["name"] = n.name;
    node["class"] = std::string(to_string(n.op_class));
    node["blocks"] = n.demand.num_blocks;
    node["threads_per_block"] = n.demand.threads_per_block;
    node["shared_mem_bytes"] = n.demand.shared_mem_per_block;
    node["registers_per_thread"] = n.demand.registers_per_thread;
    node["block_duration_us"] = n.block_duration_us;
    nodes.push_back(std::move(node));
  }
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from, e.to});
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc;
}

void write_json_file(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(path.string() + ": write failed");
}

void save_graph(const ComputationGraph& g, const std::filesystem::path& path) {
  write_json_file(graph_to_json(g), path);
}

}  // namespace streamsched
