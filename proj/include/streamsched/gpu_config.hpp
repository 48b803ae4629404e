#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include <json.hpp>

namespace streamsched {

struct GpuConfig {
  std::int64_t num_sms = 1;
  std::int64_t threads_per_sm = 2048;
  std::int64_t shared_mem_per_sm = 64 * 1024;  // bytes
  std::int64_t registers_per_sm = 65536;
  std::int64_t max_blocks_per_sm = 32;
  // Duration multiplier for a block that shares its SM with a running block of
  // the same class from another operator.
  double same_class_slowdown = 1.4;

  // Throws ConfigError unless every capacity is > 0 and the slowdown is >= 1.
  void validate() const;

  friend bool operator==(const GpuConfig&, const GpuConfig&) = default;
};

// Rough capacities of an A100 / RTX 2080 Super class device. Approximations
// for experiments, not measured values.
GpuConfig a100_like();
GpuConfig rtx2080s_like();

// "a100-like" or "2080s-like"; nullopt otherwise.
std::optional<GpuConfig> preset(std::string_view name);

GpuConfig gpu_config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json gpu_config_to_json(const GpuConfig& cfg);

// Accepts a preset name or a path to a GpuConfig JSON file.
GpuConfig load_gpu_config(const std::string& preset_or_path);

}  // namespace streamsched
