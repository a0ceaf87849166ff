#include "plume/config.hpp"

#include <algorithm>
#include <sstream>

#include "json_util.hpp"
#include "plume/error.hpp"
#include "plume/graph_io.hpp"
#include "plume/rng.hpp"

namespace plume {

using nlohmann::json;
using namespace detail;

namespace {

json noise_to_json(const NoiseParams& n) {
  return {{"seed", n.seed}, {"frequency", n.frequency}, {"octaves", n.octaves}, {"lacunarity", n.lacunarity},
          {"gain", n.gain}};
}

void noise_from_json(const json& j, const std::string& path, NoiseParams& n) {
  expect_object(j, path);
  reject_unknown_keys(j, path, {"seed", "frequency", "octaves", "lacunarity", "gain"});
  read_optional(j, path, "seed", n.seed, as_u64);
  read_optional(j, path, "frequency", n.frequency, as_number);
  read_optional(j, path, "octaves", n.octaves, as_int);
  read_optional(j, path, "lacunarity", n.lacunarity, as_number);
  read_optional(j, path, "gain", n.gain, as_number);
}

json rgb_to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

Rgb rgb_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path + ": expected an array of 3 numbers");
  return {as_number(j[0], path + "/0"), as_number(j[1], path + "/1"), as_number(j[2], path + "/2")};
}

void derive_material_seeds(MaterialParams& m, std::uint64_t seed) {
  m.color_noise.seed = derive_seed(seed, "material.color");
  m.vein_noise.seed = derive_seed(seed, "material.vein");
  m.height_noise.seed = derive_seed(seed, "material.height");
}

json mesh_to_json(const MeshConfig& m) {
  return {{"voxel_size", m.voxel_size},
          {"radius_scale", m.radius_scale},
          {"smooth_iterations", m.smooth_iterations},
          {"taubin_lambda", m.taubin_lambda},
          {"taubin_mu", m.taubin_mu},
          {"decimate_ratio", m.decimate_ratio},
          {"chunk_grid", json::array({m.chunk_grid[0], m.chunk_grid[1], m.chunk_grid[2]})},
          {"cell_budget", m.cell_budget}};
}

void mesh_from_json(const json& j, const std::string& path, MeshConfig& m) {
  expect_object(j, path);
  reject_unknown_keys(j, path,
                      {"voxel_size", "radius_scale", "smooth_iterations", "taubin_lambda", "taubin_mu",
                       "decimate_ratio", "chunk_grid", "cell_budget"});
  read_optional(j, path, "voxel_size", m.voxel_size, as_number);
  read_optional(j, path, "radius_scale", m.radius_scale, as_number);
  read_optional(j, path, "smooth_iterations", m.smooth_iterations, as_int);
  read_optional(j, path, "taubin_lambda", m.taubin_lambda, as_number);
  read_optional(j, path, "taubin_mu", m.taubin_mu, as_number);
  read_optional(j, path, "decimate_ratio", m.decimate_ratio, as_number);
  read_optional(j, path, "cell_budget", m.cell_budget, as_u64);
  if (const auto it = j.find("chunk_grid"); it != j.end()) {
    const std::string gp = join(path, "chunk_grid");
    if (!it->is_array() || it->size() != 3) throw ParseError(gp + ": expected an array [nx, ny, nz]");
    for (std::size_t a = 0; a < 3; ++a) m.chunk_grid[a] = as_int((*it)[a], gp + "/" + std::to_string(a));
  }
}

json material_to_json(const MaterialParams& m) {
  return {{"base_color_a", rgb_to_json(m.base_color_a)},
          {"base_color_b", rgb_to_json(m.base_color_b)},
          {"color_noise", noise_to_json(m.color_noise)},
          {"vein_noise", noise_to_json(m.vein_noise)},
          {"vein_strength", m.vein_strength},
          {"height_amplitude", m.height_amplitude},
          {"height_noise", noise_to_json(m.height_noise)},
          {"roughness_base", m.roughness_base},
          {"roughness_variation", m.roughness_variation},
          {"humidity", m.humidity}};
}

void material_from_json(const json& j, const std::string& path, MaterialParams& m) {
  expect_object(j, path);
  reject_unknown_keys(j, path,
                      {"base_color_a", "base_color_b", "color_noise", "vein_noise", "vein_strength",
                       "height_amplitude", "height_noise", "roughness_base", "roughness_variation", "humidity"});
  read_optional(j, path, "base_color_a", m.base_color_a, rgb_from_json);
  read_optional(j, path, "base_color_b", m.base_color_b, rgb_from_json);
  if (const auto it = j.find("color_noise"); it != j.end()) noise_from_json(*it, join(path, "color_noise"), m.color_noise);
  if (const auto it = j.find("vein_noise"); it != j.end()) noise_from_json(*it, join(path, "vein_noise"), m.vein_noise);
  if (const auto it = j.find("height_noise"); it != j.end()) {
    noise_from_json(*it, join(path, "height_noise"), m.height_noise);
  }
  read_optional(j, path, "vein_strength", m.vein_strength, as_number);
  read_optional(j, path, "height_amplitude", m.height_amplitude, as_number);
  read_optional(j, path, "roughness_base", m.roughness_base, as_number);
  read_optional(j, path, "roughness_variation", m.roughness_variation, as_number);
  read_optional(j, path, "humidity", m.humidity, as_number);
}

struct PresetShape {
  bool multi;
  bool divided;
  std::uint32_t nodes;
  int resolution;
};

std::string preset_name(const PresetShape& s) {
  std::string name = s.multi ? "multi" : "single";
  name += "_" + std::to_string(s.nodes) + "n_" + (s.resolution == 1024 ? "1k" : "4k");
  if (s.divided) name += "_4div";
  return name;
}

std::vector<PresetShape> preset_shapes() {
  std::vector<PresetShape> out;
  for (const bool divided : {false, true}) {
    for (const bool multi : {false, true}) {
      for (const std::uint32_t nodes : {50u, 250u}) {
        for (const int res : {1024, 4096}) out.push_back({multi, divided, nodes, res});
      }
    }
  }
  return out;
}

constexpr std::uint64_t kPresetSeed = 1;
constexpr std::uint32_t kMultiLayers = 3;

PipelineConfig build_preset(const PresetShape& s) {
  PipelineConfig c = default_config(kPresetSeed);
  c.preset_name = preset_name(s);
  c.graph.node_count_target = s.nodes;
  c.graph.layers = s.multi ? kMultiLayers : 1;
  c.mesh.chunk_grid = s.divided ? std::array<int, 3>{2, 2, s.multi ? 2 : 1} : std::array<int, 3>{1, 1, 1};
  c.texture_resolution = s.resolution;
  c.output_formats = {"obj", "ply"};
  c.output_dir = "out/" + c.preset_name;
  return c;
}

}  // namespace

bool PipelineConfig::wants(std::string_view format) const {
  return std::find(output_formats.begin(), output_formats.end(), format) != output_formats.end();
}

void PipelineConfig::validate() const {
  graph.validate("graph");
  mesh.validate("mesh");
  material.validate("material");
  if (!is_supported_resolution(texture_resolution)) {
    throw ConfigError("texture_resolution (" + std::to_string(texture_resolution) +
                      ") must be a power of two in [256, 8192]");
  }
  if (output_formats.empty()) throw ConfigError("output_formats must list at least one of obj, ply");
  for (std::size_t i = 0; i < output_formats.size(); ++i) {
    const std::string& f = output_formats[i];
    if (f != "obj" && f != "ply") throw ConfigError("output_formats[" + std::to_string(i) + "] (" + f + ") must be obj or ply");
    if (std::count(output_formats.begin(), output_formats.end(), f) > 1) {
      throw ConfigError("output_formats lists " + f + " more than once");
    }
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (mesh.voxel_size > graph.radius_min * mesh.radius_scale) {
    std::ostringstream os;
    os.precision(17);
    os << "mesh.voxel_size (" << mesh.voxel_size << ") must be <= graph.radius_min (" << graph.radius_min
       << ") * mesh.radius_scale (" << mesh.radius_scale << ")";
    throw ConfigError(os.str());
  }
}

PipelineConfig default_config(std::uint64_t seed) {
  PipelineConfig c;
  c.graph.seed = seed;
  derive_material_seeds(c.material, seed);
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["version"] = kConfigVersion;
  if (!c.preset_name.empty()) j["preset_name"] = c.preset_name;
  j["seed"] = c.graph.seed;
  j["graph"] = graph_config_to_json(c.graph);
  j["mesh"] = mesh_to_json(c.mesh);
  j["material"] = material_to_json(c.material);
  j["texture_resolution"] = c.texture_resolution;
  j["output_formats"] = c.output_formats;
  j["output_dir"] = c.output_dir;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  expect_object(j, "");
  reject_unknown_keys(j, "",
                      {"version", "preset", "preset_name", "seed", "node_count_target", "graph", "mesh", "material",
                       "texture_resolution", "output_formats", "output_dir"});
  if (const auto it = j.find("version"); it != j.end()) {
    const int v = as_int(*it, "/version");
    if (v != kConfigVersion) throw ParseError("/version: unsupported config version " + std::to_string(v));
  }

  PipelineConfig c;
  if (const auto it = j.find("preset"); it != j.end()) {
    const std::string name = as_string(*it, "/preset");
    const auto base = find_preset(name);
    if (!base) throw ParseError("/preset: unknown preset '" + name + "'");
    c = *base;
  }

  // The master seed may be given at the top level, inside "graph", or both if they agree.
  std::optional<std::uint64_t> seed;
  if (const auto it = j.find("seed"); it != j.end()) seed = as_u64(*it, "/seed");
  const auto graph_it = j.find("graph");
  if (graph_it != j.end() && graph_it->is_object()) {
    if (const auto s = graph_it->find("seed"); s != graph_it->end()) {
      const std::uint64_t gs = as_u64(*s, "/graph/seed");
      if (seed && *seed != gs) throw ParseError("/graph/seed: disagrees with /seed");
      seed = gs;
    }
  }
  if (seed) {
    c.graph.seed = *seed;
    derive_material_seeds(c.material, *seed);
  }

  if (graph_it != j.end()) {
    const std::uint64_t keep_seed = c.graph.seed;
    GraphConfig g = graph_config_from_json(*graph_it, "/graph");
    // graph_config_from_json starts from library defaults; re-apply only the keys present.
    json merged = graph_config_to_json(c.graph);
    for (const auto& item : graph_it->items()) {
      if (item.key() == "distribution") {
        for (const auto& d : item.value().items()) merged["distribution"][d.key()] = d.value();
      } else {
        merged[item.key()] = item.value();
      }
    }
    g = graph_config_from_json(merged, "/graph");
    g.seed = keep_seed;
    c.graph = g;
  }
  if (const auto it = j.find("node_count_target"); it != j.end()) {
    const std::uint32_t n = as_u32(*it, "/node_count_target");
    if (graph_it != j.end() && graph_it->contains("node_count_target") &&
        graph_it->at("node_count_target") != *it) {
      throw ParseError("/node_count_target: disagrees with /graph/node_count_target");
    }
    c.graph.node_count_target = n;
  }
  if (const auto it = j.find("mesh"); it != j.end()) mesh_from_json(*it, "/mesh", c.mesh);
  if (const auto it = j.find("material"); it != j.end()) material_from_json(*it, "/material", c.material);
  read_optional(j, "", "texture_resolution", c.texture_resolution, as_int);
  if (const auto it = j.find("output_formats"); it != j.end()) {
    if (!it->is_array()) throw ParseError("/output_formats: expected an array of strings");
    c.output_formats.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      c.output_formats.push_back(as_string((*it)[i], "/output_formats/" + std::to_string(i)));
    }
  }
  read_optional(j, "", "output_dir", c.output_dir, as_string);
  read_optional(j, "", "preset_name", c.preset_name, as_string);
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path_or_preset) {
  const std::filesystem::path path(path_or_preset);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    if (const auto p = find_preset(path_or_preset)) return *p;
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("config '" + path_or_preset + "' is neither a readable file nor a preset (presets: " + names + ")");
  }
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& s : preset_shapes()) out.push_back(preset_name(s));
  return out;
}

std::optional<PipelineConfig> find_preset(std::string_view name) {
  for (const auto& s : preset_shapes()) {
    if (preset_name(s) == name) return build_preset(s);
  }
  return std::nullopt;
}

PipelineConfig preset(std::string_view name) {
  if (auto p = find_preset(name)) return *p;
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "' (valid: " + names + ")");
}

}  // namespace plume
