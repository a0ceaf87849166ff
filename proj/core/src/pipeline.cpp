#include "plume/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "plume/error.hpp"
#include "plume/graph_io.hpp"
#include "plume/mesh_io.hpp"

namespace plume {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void say(const RunOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

void remove_recorded(const RunManifest& m, const fs::path& dir, Stage from) {
  for (const auto& a : m.artifacts) {
    if (a.stage < from) continue;
    std::error_code ec;
    fs::remove(dir / a.path, ec);
  }
}

struct StageContext {
  const PipelineConfig& config;
  const RunOptions& options;
  const fs::path& dir;
  RunManifest& manifest;
  RunResult& result;
};

void record_all(StageContext& ctx, const std::vector<fs::path>& files, Stage stage) {
  for (const auto& f : files) {
    ctx.manifest.record(ctx.dir, f, stage);
    ctx.result.written.push_back(f);
  }
}

void graph_stage(StageContext& ctx) {
  const Graph graph = generate_graph(ctx.config.graph);
  say(ctx.options, "graph: " + std::to_string(graph.nodes.size()) + " nodes over " + std::to_string(graph.layers) +
                       " layer(s)");
  const fs::path file = ctx.dir / kGraphFile;
  write_graph_manifest(file, graph, ctx.config.graph);
  record_all(ctx, {file}, Stage::kGraph);
  ctx.result.node_count = graph.nodes.size();
}

void mesh_stage(StageContext& ctx) {
  auto [graph, graph_config] = read_graph_manifest(ctx.dir / kGraphFile);
  if (!(graph_config == ctx.config.graph)) {
    throw StaleArtifactError(kGraphFile, std::string("stale artifact: ") + kGraphFile +
                                             " was generated with a different graph configuration");
  }
  ctx.result.node_count = graph.nodes.size();
  const MeshConfig& mc = ctx.config.mesh;
  TriMesh mesh = skin_graph(graph, mc);
  ctx.result.raw_triangles = mesh.triangles.size();
  say(ctx.options, "mesh: skin has " + std::to_string(mesh.triangles.size()) + " triangles");
  mesh = smooth_mesh(mesh, mc);
  DecimationResult dec = decimate(mesh, mc);
  say(ctx.options, "mesh: decimated to " + std::to_string(dec.mesh.triangles.size()) + " triangles" +
                       (dec.reached_target ? "" : " (target not reached)"));
  ctx.result.triangles = dec.mesh.triangles.size();
  std::vector<Chunk> chunks = chunk_mesh(dec.mesh, mc, graph.layers);
  ctx.result.chunk_count = chunks.size();
  std::vector<fs::path> files;
  for (Chunk& c : chunks) {
    c.mesh.uvs = build_uv_atlas(c.mesh, ctx.config.texture_resolution).uvs;
    const fs::path cache = ctx.dir / kChunkCacheDir / (chunk_stem(c) + ".bin");
    write_chunk_cache(c, cache);
    files.push_back(cache);
  }
  const ExportOptions eo{ctx.options.z_up};
  if (ctx.config.wants("obj")) {
    const auto f = export_obj(chunks, ctx.dir, eo);
    files.insert(files.end(), f.begin(), f.end());
  }
  if (ctx.config.wants("ply")) {
    const auto f = export_ply(chunks, ctx.dir, eo);
    files.insert(files.end(), f.begin(), f.end());
  }
  say(ctx.options, "mesh: " + std::to_string(chunks.size()) + " chunk(s) written");
  record_all(ctx, files, Stage::kMesh);
}

void texture_stage(StageContext& ctx) {
  const int res = ctx.config.texture_resolution;
  const std::string prefix = std::string(kChunkCacheDir) + "/";
  std::size_t baked = 0;
  for (const std::string& rel : ctx.manifest.files_of(Stage::kMesh)) {
    if (rel.rfind(prefix, 0) != 0) continue;
    Chunk chunk = read_chunk_cache(ctx.dir / rel);
    const UvAtlas atlas = build_uv_atlas(chunk.mesh, res);
    if (atlas.uvs != chunk.mesh.uvs) {
      throw StaleArtifactError(rel, "stale artifact: " + rel + " was parameterized for a different resolution");
    }
    chunk.textures = bake_chunk(chunk.mesh, atlas, ctx.config.material, res);
    std::vector<fs::path> files = write_textures(chunk, ctx.dir);
    if (ctx.config.wants("obj")) files.push_back(write_mtl(chunk, ctx.dir, true));
    record_all(ctx, files, Stage::kTexture);
    ++baked;
    say(ctx.options, "texture: baked " + chunk_stem(chunk) + " at " + std::to_string(res) + "^2");
  }
  ctx.result.chunk_count = baked;
}

}  // namespace

StageSelector StageSelector::parse(std::string_view list, bool resume) {
  StageSelector s;
  s.stages.clear();
  s.resume = resume;
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    s.stages.push_back(stage_from_string(item));
  }
  s.validate();
  return s;
}

void StageSelector::validate() const {
  if (stages.empty()) throw ConfigError("--stages must name at least one of graph, mesh, texture");
  for (std::size_t i = 1; i < stages.size(); ++i) {
    if (static_cast<int>(stages[i]) != static_cast<int>(stages[i - 1]) + 1) {
      throw ConfigError("--stages must be contiguous and ordered graph -> mesh -> texture");
    }
  }
}

RunResult run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  options.selector.validate();
  RunResult result;
  result.output_dir = options.output_dir.value_or(fs::path(config.output_dir));
  const fs::path& dir = result.output_dir;
  const Stage first = options.selector.stages.front();
  const nlohmann::json snapshot = config_to_json(config);

  RunManifest manifest;
  if (options.selector.resume) {
    std::error_code ec;
    if (!fs::is_regular_file(dir / kRunManifestFile, ec)) {
      throw ContractViolation("cannot resume " + dir.string() + ": no run manifest from an earlier stage");
    }
    manifest = load_manifest(dir, true);
    if (manifest.config != snapshot) {
      throw ConfigError("cannot resume " + dir.string() + ": its manifest was written for a different configuration");
    }
    if (manifest.z_up != options.z_up) {
      throw ConfigError("cannot resume " + dir.string() + ": recorded axis convention differs from --z-up");
    }
    for (int s = 0; s < static_cast<int>(first); ++s) {
      if (!manifest.done(static_cast<Stage>(s))) {
        throw ContractViolation(std::string("stage gap: ") + to_string(first) + " needs a completed " +
                                to_string(static_cast<Stage>(s)) + " stage in " + dir.string());
      }
    }
  } else {
    if (first != Stage::kGraph) {
      throw ContractViolation(std::string("stage gap: starting at ") + to_string(first) +
                              " requires --resume on a directory with the earlier stages complete");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    if (fs::is_regular_file(dir / kRunManifestFile, ec)) {
      try {
        remove_recorded(load_manifest(dir, false), dir, Stage::kGraph);
      } catch (const Error&) {
        // An unreadable manifest is simply replaced.
      }
    }
    manifest.tool_version = tool_version();
    manifest.config = snapshot;
    manifest.z_up = options.z_up;
  }
  manifest.tool_version = tool_version();

  StageContext ctx{config, options, dir, manifest, result};
  for (const Stage stage : options.selector.stages) {
    remove_recorded(manifest, dir, stage);
    manifest.invalidate_from(stage);
    say(options, std::string("stage ") + to_string(stage) + " ...");
    const Stopwatch watch;
    switch (stage) {
      case Stage::kGraph:
        graph_stage(ctx);
        break;
      case Stage::kMesh:
        mesh_stage(ctx);
        break;
      case Stage::kTexture:
        texture_stage(ctx);
        break;
    }
    const double secs = watch.seconds();
    manifest.set_done(stage, true);
    manifest.stage_seconds[to_string(stage)] = secs;
    result.seconds[to_string(stage)] = secs;
    write_manifest(manifest, dir);
    say(options, std::string("stage ") + to_string(stage) + " done in " + std::to_string(secs) + " s");
  }
  result.manifest = manifest;
  return result;
}

RunResult run(const std::string& config_path_or_preset, const RunOptions& options) {
  return run_pipeline(load_config(config_path_or_preset), options);
}

fs::path preview(const PipelineConfig& config, PreviewKind kind, const fs::path& dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create preview directory " + dir.string() + ": " + ec.message());

  if (kind == PreviewKind::kGraph) {
    const Graph g = generate_graph(config.graph);
    std::size_t edges = 0;
    for (const Node& n : g.nodes) {
      for (const NodeId e : n.edges) edges += e > n.id ? 1 : 0;
    }
    std::string s = "ply\nformat ascii 1.0\ncomment plume skeleton preview\n";
    s += "element vertex " + std::to_string(g.nodes.size()) + "\n";
    s += "property double x\nproperty double y\nproperty double z\nproperty double radius\n";
    s += "element edge " + std::to_string(edges) + "\n";
    s += "property int vertex1\nproperty int vertex2\nend_header\n";
    char buf[160];
    for (const Node& n : g.nodes) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", n.coordinates.x, n.coordinates.y, n.coordinates.z,
                    n.radius);
      s += buf;
    }
    for (const Node& n : g.nodes) {
      for (const NodeId e : n.edges) {
        if (e > n.id) s += std::to_string(n.id) + " " + std::to_string(e) + "\n";
      }
    }
    const fs::path file = dir / "preview_graph.ply";
    write_text_file(file, s);
    return file;
  }

  // Proof sheet: four 256^2 panels of the same 16 m x 16 m slice of the z = 0 plane.
  const int panel = kProofSheetSize / 2;
  const double extent = 16.0;
  const double step = extent / panel;
  const MaterialParams& m = config.material;
  std::vector<MaterialSample> samples(static_cast<std::size_t>(panel) * panel);
  for (int y = 0; y < panel; ++y) {
    for (int x = 0; x < panel; ++x) {
      const Vec3 p{(x + 0.5) * step, (panel - y - 0.5) * step, 0.0};
      samples[static_cast<std::size_t>(y) * panel + x] = material_eval(p, {0, 0, 1}, m);
    }
  }
  const auto h = [&](int x, int y) {
    x = std::clamp(x, 0, panel - 1);
    y = std::clamp(y, 0, panel - 1);
    return samples[static_cast<std::size_t>(y) * panel + x].height;
  };
  Image sheet(kProofSheetSize, kProofSheetSize, 3);
  for (int y = 0; y < panel; ++y) {
    for (int x = 0; x < panel; ++x) {
      const MaterialSample& s = samples[static_cast<std::size_t>(y) * panel + x];
      std::uint8_t* c = sheet.at(x, y);
      c[0] = encode_srgb(s.albedo.r);
      c[1] = encode_srgb(s.albedo.g);
      c[2] = encode_srgb(s.albedo.b);
      const double dx = (h(x + 1, y) - h(x - 1, y)) / (2.0 * step);
      const double dy = -(h(x, y + 1) - h(x, y - 1)) / (2.0 * step);
      const auto n = encode_normal(normalized(Vec3{-dx, -dy, 1.0}));
      std::copy(n.begin(), n.end(), sheet.at(x + panel, y));
      const auto r = static_cast<std::uint8_t>(std::floor(s.roughness * 255.0 + 0.5));
      std::uint8_t* rp = sheet.at(x, y + panel);
      rp[0] = rp[1] = rp[2] = r;
      const double hn = m.height_amplitude > 0.0 ? 0.5 + 0.5 * s.height / m.height_amplitude : 0.5;
      const auto hv = static_cast<std::uint8_t>(std::floor(std::clamp(hn, 0.0, 1.0) * 255.0 + 0.5));
      std::uint8_t* hp = sheet.at(x + panel, y + panel);
      hp[0] = hp[1] = hp[2] = hv;
    }
  }
  const fs::path file = dir / "preview_texture.png";
  write_png(file, sheet);
  return file;
}

}  // namespace plume
