#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamsched/graph.hpp"

namespace streamsched {

// Reads and parses a JSON file. Throws ParseError with the path and the
// parser's line/column on malformed input.
nlohmann::json read_json_file(const std::filesystem::path& path);

// Graph file schema:
//   {"nodes":[{"id","name","class"?,"blocks","threads_per_block",
//              "shared_mem_bytes","registers_per_thread","block_duration_us"}],
//    "edges":[[from,to],...]}
// A node without "class" is classified by name; unknown names append a
// message to `warnings` when it is non-null.
ComputationGraph graph_from_json(const nlohmann::json& doc, std::vector<std::string>* warnings = nullptr);

// Overlays profile records onto graph-file nodes by id. Profile fields win;
// a profile id absent from the graph is a ValidationError.
nlohmann::json merge_profile(nlohmann::json graph_doc, const nlohmann::json& profile_doc);

ComputationGraph load_graph(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& profile = std::nullopt,
                            std::vector<std::string>* warnings = nullptr);

// Always writes an explicit "class" so a reload never reclassifies.
nlohmann::ordered_json graph_to_json(const ComputationGraph& g);
void save_graph(const ComputationGraph& g, const std::filesystem::path& path);

// Writes `doc` with two-space indentation and a trailing newline.
void write_json_file(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

}  // namespace streamsched
