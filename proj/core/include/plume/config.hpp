#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "plume/graph.hpp"
#include "plume/mesh.hpp"
#include "plume/texture.hpp"

namespace plume {

inline constexpr int kConfigVersion = 1;

/// Every tunable of the three stages plus the master seed.
struct PipelineConfig {
  std::string preset_name;  ///< optional label
  GraphConfig graph;        ///< graph.seed is the master seed
  MeshConfig mesh;
  MaterialParams material;
  int texture_resolution = 1024;
  std::vector<std::string> output_formats{"obj"};  ///< subset of {obj, ply}
  std::string output_dir = "out";

  [[nodiscard]] std::uint64_t seed() const { return graph.seed; }
  /// Range checks of every section plus the cross-section constraints.
  void validate() const;
  [[nodiscard]] bool wants(std::string_view format) const;
  bool operator==(const PipelineConfig&) const = default;
};

/// Defaults for a master seed, with material noise seeds derived from it.
PipelineConfig default_config(std::uint64_t seed = 0);

/// Full snapshot with every effective value spelled out.
nlohmann::json config_to_json(const PipelineConfig& config);
/// Strict parse (unknown keys are errors) followed by validate(). A top-level "preset" key
/// starts from a bundled preset instead of the defaults.
PipelineConfig config_from_json(const nlohmann::json& document);

/// Loads a config file. When `path_or_preset` is not an existing file but names a bundled
/// preset, that preset is returned.
PipelineConfig load_config(const std::string& path_or_preset);

/// Names of the bundled presets: {single,multi}_{50n,250n}_{1k,4k}[_4div].
std::vector<std::string> preset_names();
std::optional<PipelineConfig> find_preset(std::string_view name);
/// Throws ConfigError listing the valid names when `name` is unknown.
PipelineConfig preset(std::string_view name);

}  // namespace plume
