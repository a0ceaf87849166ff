#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace plume {

inline constexpr int kRunManifestVersion = 1;
inline constexpr const char* kRunManifestFile = "manifest.json";

enum class Stage { kGraph = 0, kMesh = 1, kTexture = 2 };
const char* to_string(Stage stage);
Stage stage_from_string(const std::string& name);

struct ArtifactRecord {
  std::string path;    ///< relative to the output directory, '/' separated
  std::string sha256;  ///< lower-case hex
  std::uint64_t bytes = 0;
  Stage stage = Stage::kGraph;
  bool operator==(const ArtifactRecord&) const = default;
};

/// Progress and provenance of one output directory.
struct RunManifest {
  std::string tool_version;
  nlohmann::json config;  ///< effective PipelineConfig snapshot
  bool z_up = false;
  bool graph_done = false;
  bool mesh_done = false;
  bool texture_done = false;
  std::vector<ArtifactRecord> artifacts;        ///< sorted by path
  std::map<std::string, double> stage_seconds;  ///< wall clock per stage

  [[nodiscard]] bool done(Stage stage) const;
  void set_done(Stage stage, bool value);
  /// Drops the records produced by `stage` and every later stage and clears their flags.
  void invalidate_from(Stage stage);
  /// Hashes `file` (inside `dir`) and records it, replacing any record with the same path.
  void record(const std::filesystem::path& dir, const std::filesystem::path& file, Stage stage);
  /// Files recorded for one stage, in path order.
  [[nodiscard]] std::vector<std::string> files_of(Stage stage) const;
  bool operator==(const RunManifest&) const = default;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);
/// Strict parse; throws ParseError with the JSON path or ValidationError for non-monotone
/// stage flags.
RunManifest manifest_from_json(const nlohmann::json& document);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);
/// Loads dir/manifest.json and, when `verify` is set, re-hashes every recorded artifact.
/// A missing or modified file raises StaleArtifactError naming it.
RunManifest load_manifest(const std::filesystem::path& dir, bool verify = true);
/// Re-hashes every artifact; returns the relative paths that are missing or modified.
std::vector<std::string> audit_artifacts(const RunManifest& manifest, const std::filesystem::path& dir);

std::string tool_version();

}  // namespace plume
