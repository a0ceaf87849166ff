#include "plume/manifest.hpp"

#include <algorithm>

#include "json_util.hpp"
#include "plume/digest.hpp"
#include "plume/error.hpp"
#include "plume/graph_io.hpp"

#ifndef PLUME_VERSION
#define PLUME_VERSION "0.0.0"
#endif

namespace plume {

using nlohmann::json;
using namespace detail;

std::string tool_version() { return std::string("plume ") + PLUME_VERSION; }

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kGraph:
      return "graph";
    case Stage::kMesh:
      return "mesh";
    case Stage::kTexture:
      return "texture";
  }
  return "?";
}

Stage stage_from_string(const std::string& name) {
  if (name == "graph") return Stage::kGraph;
  if (name == "mesh") return Stage::kMesh;
  if (name == "texture") return Stage::kTexture;
  throw ConfigError("unknown stage '" + name + "' (valid: graph, mesh, texture)");
}

bool RunManifest::done(Stage stage) const {
  switch (stage) {
    case Stage::kGraph:
      return graph_done;
    case Stage::kMesh:
      return mesh_done;
    case Stage::kTexture:
      return texture_done;
  }
  return false;
}

void RunManifest::set_done(Stage stage, bool value) {
  switch (stage) {
    case Stage::kGraph:
      graph_done = value;
      break;
    case Stage::kMesh:
      mesh_done = value;
      break;
    case Stage::kTexture:
      texture_done = value;
      break;
  }
}

void RunManifest::invalidate_from(Stage stage) {
  for (int s = static_cast<int>(stage); s <= static_cast<int>(Stage::kTexture); ++s) {
    set_done(static_cast<Stage>(s), false);
    stage_seconds.erase(to_string(static_cast<Stage>(s)));
  }
  artifacts.erase(std::remove_if(artifacts.begin(), artifacts.end(),
                                 [&](const ArtifactRecord& a) { return a.stage >= stage; }),
                  artifacts.end());
}

void RunManifest::record(const std::filesystem::path& dir, const std::filesystem::path& file, Stage stage) {
  const std::filesystem::path full = file.is_absolute() ? file : dir / file;
  ArtifactRecord rec;
  rec.path = std::filesystem::relative(full, dir).generic_string();
  rec.sha256 = sha256_file(full);
  rec.bytes = std::filesystem::file_size(full);
  rec.stage = stage;
  const auto it = std::lower_bound(artifacts.begin(), artifacts.end(), rec.path,
                                   [](const ArtifactRecord& a, const std::string& p) { return a.path < p; });
  if (it != artifacts.end() && it->path == rec.path) {
    *it = rec;
  } else {
    artifacts.insert(it, rec);
  }
}

std::vector<std::string> RunManifest::files_of(Stage stage) const {
  std::vector<std::string> out;
  for (const auto& a : artifacts) {
    if (a.stage == stage) out.push_back(a.path);
  }
  return out;
}

json manifest_to_json(const RunManifest& m) {
  json artifacts = json::array();
  for (const auto& a : m.artifacts) {
    artifacts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}, {"stage", to_string(a.stage)}});
  }
  json seconds = json::object();
  for (const auto& [k, v] : m.stage_seconds) seconds[k] = v;
  return {{"version", kRunManifestVersion},
          {"tool_version", m.tool_version},
          {"config", m.config},
          {"axes", m.z_up ? "z-up" : "y-up"},
          {"stages", {{"graph", m.graph_done}, {"mesh", m.mesh_done}, {"texture", m.texture_done}}},
          {"artifacts", artifacts},
          {"stage_seconds", seconds}};
}

RunManifest manifest_from_json(const json& j) {
  expect_object(j, "");
  reject_unknown_keys(j, "", {"version", "tool_version", "config", "axes", "stages", "artifacts", "stage_seconds"});
  const int version = as_int(require_key(j, "", "version"), "/version");
  if (version != kRunManifestVersion) throw ParseError("/version: unsupported manifest version " + std::to_string(version));
  RunManifest m;
  m.tool_version = as_string(require_key(j, "", "tool_version"), "/tool_version");
  m.config = require_key(j, "", "config");
  expect_object(m.config, "/config");
  const std::string axes = as_string(require_key(j, "", "axes"), "/axes");
  if (axes != "y-up" && axes != "z-up") throw ParseError("/axes: expected \"y-up\" or \"z-up\"");
  m.z_up = axes == "z-up";

  const json& stages = require_key(j, "", "stages");
  expect_object(stages, "/stages");
  reject_unknown_keys(stages, "/stages", {"graph", "mesh", "texture"});
  m.graph_done = as_bool(require_key(stages, "/stages", "graph"), "/stages/graph");
  m.mesh_done = as_bool(require_key(stages, "/stages", "mesh"), "/stages/mesh");
  m.texture_done = as_bool(require_key(stages, "/stages", "texture"), "/stages/texture");
  if ((m.texture_done && !m.mesh_done) || (m.mesh_done && !m.graph_done)) {
    throw ValidationError("/stages: completed stages must be monotone (texture implies mesh implies graph)");
  }

  const json& artifacts = require_key(j, "", "artifacts");
  if (!artifacts.is_array()) throw ParseError("/artifacts: expected an array");
  for (std::size_t i = 0; i < artifacts.size(); ++i) {
    const std::string path = "/artifacts/" + std::to_string(i);
    const json& a = artifacts[i];
    expect_object(a, path);
    reject_unknown_keys(a, path, {"path", "sha256", "bytes", "stage"});
    ArtifactRecord rec;
    rec.path = as_string(require_key(a, path, "path"), path + "/path");
    rec.sha256 = as_string(require_key(a, path, "sha256"), path + "/sha256");
    rec.bytes = as_u64(require_key(a, path, "bytes"), path + "/bytes");
    try {
      rec.stage = stage_from_string(as_string(require_key(a, path, "stage"), path + "/stage"));
    } catch (const ParseError&) {
      throw;
    } catch (const ConfigError& e) {
      throw ParseError(path + "/stage: " + e.what());
    }
    if (rec.path.empty() || rec.path.find("..") != std::string::npos || rec.path.front() == '/') {
      throw ParseError(path + "/path: must be a relative path inside the output directory");
    }
    if (!m.done(rec.stage)) throw ValidationError(path + ": artifact of incomplete stage " + to_string(rec.stage));
    if (!m.artifacts.empty() && !(m.artifacts.back().path < rec.path)) {
      throw ParseError(path + ": artifacts must be sorted by path without duplicates");
    }
    m.artifacts.push_back(rec);
  }
  const json& seconds = require_key(j, "", "stage_seconds");
  expect_object(seconds, "/stage_seconds");
  for (const auto& item : seconds.items()) {
    stage_from_string(item.key());
    m.stage_seconds[item.key()] = as_number(item.value(), "/stage_seconds/" + item.key());
  }
  return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  write_text_file(dir / kRunManifestFile, dump_json(manifest_to_json(manifest)));
}

std::vector<std::string> audit_artifacts(const RunManifest& manifest, const std::filesystem::path& dir) {
  std::vector<std::string> stale;
  for (const auto& a : manifest.artifacts) {
    const std::filesystem::path file = dir / a.path;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec) || sha256_file(file) != a.sha256) stale.push_back(a.path);
  }
  return stale;
}

RunManifest load_manifest(const std::filesystem::path& dir, bool verify) {
  const std::filesystem::path file = dir / kRunManifestFile;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) throw IoError("no run manifest at " + file.string());
  json doc;
  try {
    doc = json::parse(read_text_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  RunManifest m = manifest_from_json(doc);
  if (verify) {
    for (const auto& a : m.artifacts) {
      const std::filesystem::path f = dir / a.path;
      if (!std::filesystem::is_regular_file(f, ec)) {
        throw StaleArtifactError(a.path, "stale artifact: " + a.path + " is missing");
      }
      if (sha256_file(f) != a.sha256) {
        throw StaleArtifactError(a.path, "stale artifact: " + a.path + " does not match its recorded digest");
      }
    }
  }
  return m;
}

}  // namespace plume
