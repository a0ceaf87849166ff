// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "plume/bench.hpp"
#include "plume/config.hpp"
#include "plume/graph.hpp"
#include "plume/graph_io.hpp"
#include "plume/image.hpp"
#include "plume/manifest.hpp"
#include "plume/mesh.hpp"
#include "plume/mesh_io.hpp"
#include "plume/pipeline.hpp"
#include "plume/texture.hpp"

using namespace plume;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

const std::set<std::string> kTimingFiles{kRunManifestFile};

fs::path root_dir() {
  static const fs::path dir = oracle::scratch_dir("acceptance");
  return dir;
}

void progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

RunResult run_into(const PipelineConfig& c, const fs::path& dir, std::string_view stages = "graph,mesh,texture",
                   bool resume = false) {
  RunOptions o;
  o.selector = StageSelector::parse(stages, resume);
  o.output_dir = dir;
  return run_pipeline(c, o);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::vector<Chunk> cached_chunks(const fs::path& dir) {
  std::vector<Chunk> out;
  const RunManifest m = load_manifest(dir);
  for (const auto& rel : m.files_of(Stage::kMesh)) {
    if (rel.rfind(std::string(kChunkCacheDir) + "/", 0) == 0) out.push_back(read_chunk_cache(dir / rel));
  }
  return out;
}

TriMesh preset_mesh(const std::string& name, MeshConfig* used = nullptr) {
  const PipelineConfig c = preset(name);
  if (used) *used = c.mesh;
  return decimate(smooth_mesh(skin_graph(generate_graph(c.graph), c.mesh), c.mesh), c.mesh).mesh;
}

// 1
Outcome determinism() {
  const PipelineConfig c = preset("single_50n_1k");
  const auto t0 = std::chrono::steady_clock::now();
  run_into(c, root_dir() / "det_a");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run_into(c, root_dir() / "det_b");
  const auto a = oracle::tree_contents(root_dir() / "det_a", kTimingFiles);
  const auto b = oracle::tree_contents(root_dir() / "det_b", kTimingFiles);
  std::size_t graph = 0, obj = 0, ply = 0, png = 0;
  for (const auto& [rel, bytes] : a) {
    graph += rel == kGraphFile;
    obj += rel.ends_with(".obj");
    ply += rel.ends_with(".ply");
    png += rel.ends_with(".png");
  }
  const bool complete = graph == 1 && obj > 0 && ply > 0 && png >= 3;
  return {a == b && complete && secs < 120.0,
          std::to_string(a.size()) + " files identical=" + (a == b ? "yes" : "no") +
              fmt(", one run %.1f s", secs)};
}

// 2
Outcome forbidden_zone() {
  std::size_t checked = 0, inside = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GraphConfig gc;
    gc.seed = seed;
    gc.node_count_target = 100;
    const Graph g = generate_graph(gc);
    for (const Node& n : g.nodes) {
      if (n.connector || !n.parent) continue;
      const Node& p = g.nodes[*n.parent];
      if (!p.parent) continue;
      const Node& gp = g.nodes[*p.parent];
      const double angle =
          oracle::planar_angle_deg(n.coordinates.x - p.coordinates.x, n.coordinates.y - p.coordinates.y,
                                   gp.coordinates.x - p.coordinates.x, gp.coordinates.y - p.coordinates.y);
      ++checked;
      inside += angle <= gc.forbidden_half_angle_deg;
    }
  }
  return {inside == 0 && checked > 0,
          std::to_string(inside) + " of " + std::to_string(checked) + " child directions inside the sector"};
}

// 3
Outcome distribution_fidelity() {
  const AngularWeights w = gaussian_weights(90.0, 20.0);
  const std::vector<double> exact = oracle::wrapped_normal_bins(90.0, 20.0);
  Rng rng(20240901);
  const int draws = 1000000;
  std::vector<double> freq(360, 0.0);
  for (int i = 0; i < draws; ++i) freq[static_cast<std::size_t>(sample_section(w, rng))] += 1.0 / draws;
  const double tv = oracle::total_variation(freq, exact);
  return {tv <= 0.01, fmt("total variation %.5f over 1e6 draws", tv)};
}

// 4
Outcome radius_and_slope() {
  std::size_t nodes = 0, pairs = 0, slopes = 0, bad = 0;
  double worst_slope = 0.0;
  for (const char* name : {"single_50n_1k", "single_250n_1k", "multi_50n_1k", "multi_250n_1k"}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      GraphConfig gc = preset(name).graph;
      gc.seed = seed;
      const Graph g = generate_graph(gc);
      for (const Node& n : g.nodes) {
        ++nodes;
        bad += !(n.radius >= gc.radius_min && n.radius <= gc.radius_max);
        if (n.parent && !n.connector) {
          const Node& p = g.nodes[*n.parent];
          if (!p.connector && p.layer == n.layer) {
            const double d = planar_distance(n.coordinates, p.coordinates);
            ++pairs;
            bad += !(d >= gc.radius_min - 1e-9 && d <= gc.radius_max + 1e-9);
          }
        }
        for (const NodeId e : n.edges) {
          const Node& m = g.nodes[e];
          if (e < n.id || !(n.connector || m.connector || n.layer != m.layer)) continue;
          const double run = std::hypot(n.coordinates.x - m.coordinates.x, n.coordinates.y - m.coordinates.y);
          const double slope = std::atan2(std::abs(n.coordinates.z - m.coordinates.z), run) * 180.0 / kPi;
          ++slopes;
          worst_slope = std::max(worst_slope, slope);
          bad += slope > gc.max_interconnect_angle_deg + 1e-9;
        }
      }
    }
  }
  return {bad == 0 && slopes > 0,
          std::to_string(nodes) + " radii, " + std::to_string(pairs) + " spacings, " + std::to_string(slopes) +
              " passage edges" + fmt(" (steepest %.2f deg), ", worst_slope) + std::to_string(bad) + " violations"};
}

// 5
Outcome mesh_fidelity() {
  const Graph g = oracle::capsule_graph({0, 0, 0}, {10, 0, 0}, 2.0);
  MeshConfig c;
  c.voxel_size = 0.25;
  c.radius_scale = 1.0;
  auto worst = [](const TriMesh& m) {
    double w = 0.0;
    for (const Vec3& p : m.positions) w = std::max(w, std::abs(oracle::tapered_capsule(p, {0, 0, 0}, {10, 0, 0}, 2, 2)));
    return w;
  };
  const TriMesh raw = skin_graph(g, c);
  const TriMesh smooth = smooth_mesh(raw, c);
  const TriMesh dec = decimate(smooth, c).mesh;
  bool topo = true;
  for (const TriMesh* m : {&raw, &smooth, &dec}) {
    const oracle::Topology t = oracle::topology(*m);
    topo = topo && t.closed_manifold() && t.euler() == 2;
  }
  const double e_raw = worst(raw), e_final = worst(dec);
  const bool ok = topo && e_raw <= c.voxel_size * std::sqrt(3.0) && e_final <= 2.0 * c.voxel_size;
  return {ok, fmt("max |sdf| %.4f after skinning, %.4f after smooth+decimate", e_raw, e_final) +
                  (topo ? ", closed with chi=2 at every stage" : ", topology broken")};
}

// 6
Outcome decimation_budget() {
  std::vector<std::pair<std::string, TriMesh>> fixtures;
  MeshConfig capsule;
  capsule.voxel_size = 0.125;
  capsule.radius_scale = 1.0;
  fixtures.emplace_back("capsule",
                        smooth_mesh(skin_graph(oracle::capsule_graph({0, 0, 0}, {10, 0, 0}, 2.0), capsule), capsule));
  for (const char* name : {"single_50n_1k", "multi_50n_1k", "single_250n_1k"}) {
    const PipelineConfig c = preset(name);
    fixtures.emplace_back(name, smooth_mesh(skin_graph(generate_graph(c.graph), c.mesh), c.mesh));
  }
  bool ok = true;
  std::string detail;
  for (const auto& [name, mesh] : fixtures) {
    if (mesh.triangles.size() < 10000) continue;
    MeshConfig c;
    c.decimate_ratio = 0.25;
    const TriMesh out = decimate(mesh, c).mesh;
    const double ratio = static_cast<double>(out.triangles.size()) / static_cast<double>(mesh.triangles.size());
    const bool closed = oracle::topology(out).closed_manifold();
    ok = ok && ratio <= 0.26 && closed;
    detail += (detail.empty() ? "" : ", ") + name + fmt(" %.4f", ratio) + (closed ? "" : " (open)");
  }
  return {ok && !detail.empty(), "kept " + detail};
}

// 7
Outcome chunk_conservation() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"single_250n_1k_4div", "multi_250n_1k_4div"}) {
    MeshConfig mc;
    const TriMesh m = preset_mesh(name, &mc);
    const std::uint32_t layers = preset(name).graph.layers;
    const auto chunks = chunk_mesh(m, mc, layers);
    double area = 0.0;
    int max_k = 0;
    for (const Chunk& ch : chunks) {
      area += oracle::total_area(ch.mesh);
      max_k = std::max(max_k, ch.index[2]);
    }
    const double before = oracle::total_area(m);
    const double rel = std::abs(area - before) / before;
    ok = ok && rel <= 1e-3;
    if (layers == 1) ok = ok && max_k == 0 && effective_chunk_grid(mc, layers)[2] == 1;
    detail += (detail.empty() ? "" : ", ") + std::string(name) + fmt(" area error %.2e", rel) + " in " +
              std::to_string(chunks.size()) + " chunks";
  }
  return {ok, detail};
}

// 8
Outcome texture_contracts() {
  // Image sizes of every grid preset, as written by the benchmark run.
  std::size_t images = 0, wrong = 0;
  for (const auto& name : preset_names()) {
    const int res = preset(name).texture_resolution;
    const fs::path dir = root_dir() / "bench" / name;
    for (const auto& rel : load_manifest(dir).files_of(Stage::kTexture)) {
      if (!rel.ends_with(".png")) continue;
      const Image img = read_png(dir / rel);
      ++images;
      wrong += img.width != res || img.height != res;
    }
  }

  // Unit-length normals over every texel of the 1K single-layer output.
  std::size_t texels = 0, off_unit = 0;
  const fs::path det = root_dir() / "det_a";
  for (const auto& rel : load_manifest(det).files_of(Stage::kTexture)) {
    if (!rel.ends_with("_normal.png")) continue;
    const Image n = read_png(det / rel);
    for (int y = 0; y < n.height; ++y) {
      for (int x = 0; x < n.width; ++x) {
        const Vec3 v = decode_normal(n.at(x, y));
        ++texels;
        off_unit += std::abs(length(v) - 1.0) > 0.02 || v.z <= 0.0;
      }
    }
  }

  // Zero relief gives flat normals.
  PipelineConfig flat = preset("single_50n_1k");
  flat.material.height_amplitude = 0.0;
  std::size_t not_flat = 0;
  for (const Chunk& ch : cached_chunks(det)) {
    const UvAtlas atlas = build_uv_atlas(ch.mesh, 1024);
    const TextureSet t = bake_chunk(ch.mesh, atlas, flat.material, 1024);
    for (int y = 0; y < 1024; ++y) {
      for (int x = 0; x < 1024; ++x) {
        const std::uint8_t* px = t.normal.at(x, y);
        not_flat += !(px[0] == 128 && px[1] == 128 && px[2] == 255);
      }
    }
  }

  // Shared boundary vertices of neighbouring chunks shade identically.
  std::size_t shared = 0, mismatched = 0;
  {
    const MaterialParams params = preset("multi_50n_1k_4div").material;
    const std::vector<Chunk> chunks = cached_chunks(root_dir() / "bench" / "multi_50n_1k_4div");
    std::map<std::tuple<double, double, double>, std::pair<std::size_t, MaterialSample>> seen;
    for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
      const TriMesh& m = chunks[ci].mesh;
      for (std::size_t v = 0; v < m.positions.size(); ++v) {
        const Vec3& p = m.positions[v];
        const MaterialSample s = material_eval(p, m.normals[v], params);
        const auto [it, fresh] = seen.emplace(std::make_tuple(p.x, p.y, p.z), std::make_pair(ci, s));
        if (fresh || it->second.first == ci) continue;
        const MaterialSample& o = it->second.second;
        ++shared;
        mismatched += std::memcmp(&o.albedo, &s.albedo, sizeof s.albedo) != 0 ||
                      std::memcmp(&o.roughness, &s.roughness, sizeof s.roughness) != 0;
      }
    }
  }

  const bool ok = images >= 48 && wrong == 0 && texels > 0 && off_unit == 0 && not_flat == 0 && shared >= 100 &&
                  mismatched == 0;
  return {ok, std::to_string(images) + " images, " + std::to_string(wrong) + " wrong size; " +
                  std::to_string(off_unit) + "/" + std::to_string(texels) + " normals off unit; " +
                  std::to_string(not_flat) + " non-flat texels at zero relief; " + std::to_string(mismatched) + "/" +
                  std::to_string(shared) + " seam samples differ"};
}

// 9
Outcome round_trip() {
  std::size_t files = 0, bad = 0;
  for (const char* name : {"multi_50n_1k_4div", "single_250n_1k_4div"}) {
    const fs::path dir = root_dir() / "bench" / name;
    for (const Chunk& ch : cached_chunks(dir)) {
      const TriMesh obj = read_obj(dir / (chunk_stem(ch) + ".obj"), {});
      const TriMesh ply = read_ply(dir / (chunk_stem(ch) + ".ply"), {});
      files += 2;
      bool obj_ok = obj.positions.size() == ch.mesh.positions.size() && obj.triangles == ch.mesh.triangles;
      bool ply_ok = ply.positions.size() == ch.mesh.positions.size() && ply.triangles == ch.mesh.triangles;
      for (std::size_t i = 0; obj_ok && i < obj.positions.size(); ++i) {
        obj_ok = distance(obj.positions[i], ch.mesh.positions[i]) <= 1e-6;
      }
      for (std::size_t i = 0; ply_ok && i < ply.positions.size(); ++i) {
        ply_ok = std::memcmp(&ply.positions[i], &ch.mesh.positions[i], sizeof(Vec3)) == 0;
      }
      bad += !obj_ok + !ply_ok;
    }
  }

  // Flip one byte of each recorded artifact in turn; the audit must name exactly that file.
  const fs::path dir = root_dir() / "tamper";
  fs::remove_all(dir);
  fs::copy(root_dir() / "det_a", dir, fs::copy_options::recursive);
  const RunManifest m = load_manifest(dir);
  std::size_t caught = 0;
  Rng rng(99);
  for (const ArtifactRecord& a : m.artifacts) {
    const fs::path f = dir / a.path;
    const std::string original = oracle::read_bytes(f);
    std::string tampered = original;
    tampered[rng.below(tampered.size())] ^= 0x20;
    write_text_file(f, tampered);
    const auto stale = audit_artifacts(m, dir);
    caught += stale == std::vector<std::string>{a.path};
    write_text_file(f, original);
  }
  const bool ok = files > 0 && bad == 0 && caught == m.artifacts.size() && audit_artifacts(m, dir).empty();
  return {ok, std::to_string(files - bad) + "/" + std::to_string(files) + " mesh files round-trip; " +
                  std::to_string(caught) + "/" + std::to_string(m.artifacts.size()) + " single-byte tampers caught"};
}

// 10
Outcome staged_equivalence() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"single_50n_1k", "multi_50n_1k_4div"}) {
    const PipelineConfig c = preset(name);
    const fs::path mono = root_dir() / (std::string("mono_") + name);
    const fs::path staged = root_dir() / (std::string("staged_") + name);
    fs::remove_all(mono);
    fs::remove_all(staged);
    run_into(c, mono);
    run_into(c, staged, "graph");
    run_into(c, staged, "mesh", true);
    run_into(c, staged, "texture", true);
    const auto a = oracle::tree_contents(mono, kTimingFiles);
    const auto b = oracle::tree_contents(staged, kTimingFiles);
    const bool same = a == b && load_manifest(mono).artifacts == load_manifest(staged).artifacts;
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + std::string(name) + ": " + std::to_string(a.size()) + " files " +
              (same ? "identical" : "differ");
  }
  return {ok, detail};
}

// 11
Outcome bench_structure() {
  const fs::path work = root_dir() / "bench";
  const BenchReport r = bench(preset_names(), 1, work, progress);
  int cells[4][4] = {};
  for (const BenchEntry& e : r.entries) {
    if (e.row >= 0 && e.row < 4 && e.col >= 0 && e.col < 4) ++cells[e.row][e.col];
  }
  bool full = r.entries.size() == 16;
  for (auto& row : cells) {
    for (const int n : row) full = full && n == 1;
  }
  const std::string table = bench_table(r);
  bool labelled = true;
  for (const char* s : kBenchRows) labelled = labelled && table.find(s) != std::string::npos;
  for (const char* s : kBenchCols) labelled = labelled && table.find(s) != std::string::npos;
  const bool hardware = r.hardware.contains("cpu") && r.hardware.contains("logical_cores");
  write_text_file(root_dir() / "bench_report.json", dump_json(bench_report_to_json(r)));
  write_text_file(root_dir() / "bench_table.txt", table);
  std::cout << table << std::flush;
  return {full && labelled && hardware, std::to_string(r.entries.size()) + " presets in a 4x4 grid, report at " +
                                            (root_dir() / "bench_report.json").string()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "end-to-end determinism", determinism},
      {2, "forbidden sector never sampled", forbidden_zone},
      {3, "angular distribution fidelity", distribution_fidelity},
      {4, "radius, spacing and passage slope", radius_and_slope},
      {5, "capsule mesh fidelity", mesh_fidelity},
      {6, "decimation budget", decimation_budget},
      {7, "chunk area conservation", chunk_conservation},
      {8, "texture contracts", texture_contracts},
      {9, "export round-trip and tamper audit", round_trip},
      {10, "staged runs equal monolithic runs", staged_equivalence},
      {11, "benchmark grid", bench_structure},
  };
  // Texture and round-trip checks read the benchmark's outputs, so the benchmark runs first.
  const std::vector<int> order{1, 2, 3, 4, 5, 6, 7, 11, 8, 9, 10};
  std::map<int, Outcome> results;
  for (const int id : order) {
    const Criterion& c = criteria[static_cast<std::size_t>(id - 1)];
    progress("criterion " + std::to_string(id) + ": " + c.name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      results[id] = c.check();
    } catch (const std::exception& e) {
      results[id] = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results[id].detail += fmt(" [%.1f s]", secs);
    progress(std::string(results[id].pass ? "PASS" : "FAIL") + " " + std::to_string(id) + ": " + results[id].detail);
  }

  int failed = 0;
  for (const Criterion& c : criteria) {
    const Outcome& o = results[c.id];
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail << "\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
