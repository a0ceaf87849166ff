#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plume/config.hpp"
#include "plume/manifest.hpp"

namespace plume {

/// Contiguous, ordered run of stages, optionally resuming an existing output directory.
struct StageSelector {
  std::vector<Stage> stages{Stage::kGraph, Stage::kMesh, Stage::kTexture};
  bool resume = false;

  /// Parses "graph,mesh,texture"-style lists.
  static StageSelector parse(std::string_view list, bool resume);
  /// Throws ConfigError unless the stages are non-empty, ordered and contiguous.
  void validate() const;
};

using LogFn = std::function<void(const std::string&)>;

struct RunOptions {
  StageSelector selector;
  std::optional<std::filesystem::path> output_dir;  ///< overrides config.output_dir
  bool z_up = false;
  LogFn log;
};

struct RunResult {
  std::filesystem::path output_dir;
  RunManifest manifest;
  std::vector<std::filesystem::path> written;  ///< files produced by this invocation
  std::map<std::string, double> seconds;       ///< stages run by this invocation
  std::size_t node_count = 0;
  std::size_t raw_triangles = 0;  ///< straight out of marching cubes
  std::size_t triangles = 0;      ///< after decimation
  std::size_t chunk_count = 0;
};

/// Graph, graph.json; mesh, chunk meshes (mesh_cache/, obj/mtl, ply); texture, PNG sets and
/// textured materials. The manifest is rewritten after each stage.
RunResult run_pipeline(const PipelineConfig& config, const RunOptions& options);
RunResult run(const std::string& config_path_or_preset, const RunOptions& options);

inline constexpr const char* kGraphFile = "graph.json";
inline constexpr const char* kChunkCacheDir = "mesh_cache";

enum class PreviewKind { kGraph, kTexture };
inline constexpr int kProofSheetSize = 512;

/// Graph: preview_graph.ply, an ASCII line set with one vertex per node. Texture:
/// preview_texture.png, a 2x2 proof sheet (colour, normal / roughness, height) of the material
/// on a horizontal slice. Neither touches stage artifacts or the run manifest.
std::filesystem::path preview(const PipelineConfig& config, PreviewKind kind, const std::filesystem::path& dir);

}  // namespace plume
