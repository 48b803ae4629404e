#include "streamsched/gpu_config.hpp"

#include <string>

#include "streamsched/error.hpp"
#include "streamsched/graph_io.hpp"

namespace streamsched {

void GpuConfig::validate() const {
  if (num_sms <= 0 || threads_per_sm <= 0 || shared_mem_per_sm <= 0 || registers_per_sm <= 0 ||
      max_blocks_per_sm <= 0) {
    throw ConfigError("gpu config: all capacities must be > 0");
  }
  if (!(same_class_slowdown >= 1.0)) throw ConfigError("gpu config: same_class_slowdown must be >= 1");
}

GpuConfig a100_like() {
  return {.num_sms = 108,
          .threads_per_sm = 2048,
          .shared_mem_per_sm = 164 * 1024,
          .registers_per_sm = 65536,
          .max_blocks_per_sm = 32,
          .same_class_slowdown = 1.4};
}

GpuConfig rtx2080s_like() {
  return {.num_sms = 48,
          .threads_per_sm = 1024,
          .shared_mem_per_sm = 64 * 1024,
          .registers_per_sm = 65536,
          .max_blocks_per_sm = 16,
          .same_class_slowdown = 1.4};
}

std::optional<GpuConfig> preset(std::string_view name) {
  if (name == "a100-like") return a100_like();
  if (name == "2080s-like") return rtx2080s_like();
  return std::nullopt;
}

GpuConfig gpu_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("gpu config: top level must be an object");
  auto get_int = [&](const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number_integer()) {
      throw ParseError(std::string("gpu config: \"") + key + "\" must be an integer");
    }
    return it->get<std::int64_t>();
  };
  GpuConfig cfg;
  cfg.num_sms = get_int("num_sms");
  cfg.threads_per_sm = get_int("threads_per_sm");
  cfg.shared_mem_per_sm = get_int("shared_mem_per_sm");
  cfg.registers_per_sm = get_int("registers_per_sm");
  cfg.max_blocks_per_sm = get_int("max_blocks_per_sm");
  auto slowdown = doc.find("same_class_slowdown");
  if (slowdown == doc.end() || !slowdown->is_number()) {
    throw ParseError("gpu config: \"same_class_slowdown\" must be a number");
  }
  cfg.same_class_slowdown = slowdown->get<double>();
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json gpu_config_to_json(const GpuConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["num_sms"] = cfg.num_sms;
  doc["threads_per_sm"] = cfg.threads_per_sm;
  doc["shared_mem_per_sm"] = cfg.shared_mem_per_sm;
  doc["registers_per_sm"] = cfg.registers_per_sm;
  doc["max_blocks_per_sm"] = cfg.max_blocks_per_sm;
  doc["same_class_slowdown"] = cfg.same_class_slowdown;
  return doc;
}

GpuConfig load_gpu_config(const std::string& preset_or_path) {
  if (auto p = preset(preset_or_path)) return *p;
  const auto doc = read_json_file(preset_or_path);
  try {
    return gpu_config_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(preset_or_path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(preset_or_path + ": " + e.what());
  }
}

}  // namespace streamsched
