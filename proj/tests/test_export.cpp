#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "plume/config.hpp"
#include "plume/digest.hpp"
#include "plume/error.hpp"
#include "plume/graph_io.hpp"
#include "plume/image.hpp"
#include "plume/manifest.hpp"
#include "plume/mesh_io.hpp"

using namespace plume;
namespace fs = std::filesystem;

namespace {

Chunk triangle_chunk() {
  Chunk c;
  c.mesh.positions = {{0.0, 0.0, 0.0}, {1.5, 0.0, 0.25}, {0.0, 2.0, -0.5}};
  c.mesh.triangles = {{0, 1, 2}};
  c.mesh.uvs = {{Vec2{0.1, 0.1}, Vec2{0.9, 0.1}, Vec2{0.1, 0.8}}};
  compute_normals(c.mesh);
  return c;
}

std::vector<Chunk> capsule_chunks() {
  MeshConfig mc;
  mc.voxel_size = 0.5;
  mc.radius_scale = 1.0;
  mc.chunk_grid = {2, 1, 1};
  const TriMesh m = skin_graph(oracle::capsule_graph({0, 0, 0}, {9, 2, 1}, 2.5), mc);
  auto chunks = chunk_mesh(m, mc, 1);
  for (Chunk& ch : chunks) ch.mesh.uvs = build_uv_atlas(ch.mesh, 256).uvs;
  return chunks;
}

std::size_t count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0;
  return n;
}

void flip_byte(const fs::path& file, std::size_t offset) {
  std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  f.get(c);
  f.seekp(static_cast<std::streamoff>(offset));
  f.put(static_cast<char>(c ^ 0x01));
}

}  // namespace

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("a single triangle exports three v, three vt and one f") {
  const auto dir = oracle::scratch_dir("obj_triangle");
  const auto files = export_obj({triangle_chunk()}, dir, {});
  const std::string obj = oracle::read_bytes(dir / "chunk_0_0_0.obj");
  CHECK(count_prefix(obj, "v ") == 3);
  CHECK(count_prefix(obj, "vt ") == 3);
  CHECK(count_prefix(obj, "f ") == 1);
  const TriMesh back = read_obj(dir / "chunk_0_0_0.obj", {});
  CHECK(back.positions.size() == 3);
  CHECK(back.triangles.size() == 1);
  CHECK(back.has_uvs());
  CHECK(fs::exists(dir / "AXES.txt"));
}

TEST_CASE("untextured chunks get a material without maps") {
  const auto dir = oracle::scratch_dir("obj_nomaps");
  export_obj({triangle_chunk()}, dir, {});
  const std::string mtl = oracle::read_bytes(dir / "chunk_0_0_0.mtl");
  CHECK(mtl.find("newmtl chunk_0_0_0") != std::string::npos);
  CHECK(mtl.find("map_") == std::string::npos);

  Chunk textured = triangle_chunk();
  write_mtl(textured, dir, true);
  const std::string with = oracle::read_bytes(dir / "chunk_0_0_0.mtl");
  CHECK(with.find("map_Kd chunk_0_0_0_color.png") != std::string::npos);
  CHECK(with.find("chunk_0_0_0_normal.png") != std::string::npos);
  CHECK(with.find("chunk_0_0_0_roughness.png") != std::string::npos);
}

TEST_CASE("empty chunk lists write nothing") {
  const auto dir = oracle::scratch_dir("empty_export") / "never";
  CHECK(export_obj({}, dir, {}).empty());
  CHECK(export_ply({}, dir, {}).empty());
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("obj and ply round-trip the chunk geometry") {
  const auto chunks = capsule_chunks();
  REQUIRE(chunks.size() == 2);
  for (const bool z_up : {false, true}) {
    const ExportOptions opt{z_up};
    const auto dir = oracle::scratch_dir(z_up ? "roundtrip_zup" : "roundtrip_yup");
    export_obj(chunks, dir, opt);
    export_ply(chunks, dir, opt);
    for (const Chunk& ch : chunks) {
      const TriMesh obj = read_obj(dir / (chunk_stem(ch) + ".obj"), opt);
      const TriMesh ply = read_ply(dir / (chunk_stem(ch) + ".ply"), opt);
      REQUIRE(obj.positions.size() == ch.mesh.positions.size());
      REQUIRE(ply.positions.size() == ch.mesh.positions.size());
      CHECK(obj.triangles == ch.mesh.triangles);
      CHECK(ply.triangles == ch.mesh.triangles);
      for (std::size_t i = 0; i < ch.mesh.positions.size(); ++i) {
        CHECK(distance(obj.positions[i], ch.mesh.positions[i]) <= 1e-6);
        CHECK(std::memcmp(&ply.positions[i], &ch.mesh.positions[i], sizeof(Vec3)) == 0);
      }
      CHECK(ply.has_uvs());
      CHECK(obj.has_uvs());
    }
  }
}

TEST_CASE("ply headers declare binary little endian") {
  const auto dir = oracle::scratch_dir("ply_header");
  export_ply({triangle_chunk()}, dir, {});
  const std::string bytes = oracle::read_bytes(dir / "chunk_0_0_0.ply");
  CHECK(bytes.rfind("ply\nformat binary_little_endian 1.0\n", 0) == 0);
}

TEST_CASE("y-up files store (x, z, -y)") {
  const auto dir = oracle::scratch_dir("axes");
  export_obj({triangle_chunk()}, dir, {});
  const std::string obj = oracle::read_bytes(dir / "chunk_0_0_0.obj");
  CHECK(obj.find("v 1.5 0.25 -0\n") != std::string::npos);
  CHECK(obj.find("v 0 -0.5 -2\n") != std::string::npos);
}

TEST_CASE("chunk cache is lossless") {
  const auto dir = oracle::scratch_dir("cache");
  for (const Chunk& ch : capsule_chunks()) {
    write_chunk_cache(ch, dir / "c.bin");
    const Chunk back = read_chunk_cache(dir / "c.bin");
    CHECK(back.index == ch.index);
    CHECK(back.mesh == ch.mesh);
    CHECK(back.bounds == ch.bounds);
  }
}

TEST_CASE("png round-trip") {
  const auto dir = oracle::scratch_dir("png");
  Image rgb(7, 5, 3), gray(4, 9, 1);
  for (std::size_t i = 0; i < rgb.pixels.size(); ++i) rgb.pixels[i] = static_cast<std::uint8_t>(i * 37);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) gray.pixels[i] = static_cast<std::uint8_t>(255 - i);
  write_png(dir / "rgb.png", rgb);
  write_png(dir / "gray.png", gray);
  CHECK(read_png(dir / "rgb.png") == rgb);
  CHECK(read_png(dir / "gray.png") == gray);
  CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
}

TEST_CASE("run manifests round-trip and audit digests") {
  const auto dir = oracle::scratch_dir("manifest");
  oracle::fs::create_directories(dir / "sub");
  write_text_file(dir / "graph.json", "{}\n");
  write_text_file(dir / "sub/a_color.png", "pixels");
  RunManifest m;
  m.tool_version = tool_version();
  m.config = config_to_json(default_config(4));
  m.graph_done = true;
  m.mesh_done = true;
  m.texture_done = true;
  m.record(dir, "graph.json", Stage::kGraph);
  m.record(dir, "sub/a_color.png", Stage::kTexture);
  m.stage_seconds["graph"] = 0.25;
  write_manifest(m, dir);
  CHECK(load_manifest(dir) == m);
  CHECK(audit_artifacts(m, dir).empty());

  flip_byte(dir / "sub/a_color.png", 2);
  CHECK(audit_artifacts(m, dir) == std::vector<std::string>{"sub/a_color.png"});
  try {
    load_manifest(dir);
    FAIL("expected StaleArtifactError");
  } catch (const StaleArtifactError& e) {
    CHECK(e.file() == "sub/a_color.png");
  }
  CHECK_NOTHROW(load_manifest(dir, false));
}

TEST_CASE("run manifests enforce monotone stages") {
  RunManifest m;
  m.tool_version = tool_version();
  m.config = nlohmann::json::object();
  m.texture_done = true;
  nlohmann::json j = manifest_to_json(m);
  CHECK_THROWS_AS(manifest_from_json(j), ValidationError);
  j = manifest_to_json(RunManifest{});
  j["surprise"] = 1;
  CHECK_THROWS_AS(manifest_from_json(j), ParseError);
}

TEST_CASE("invalidating a stage drops it and its successors") {
  const auto dir = oracle::scratch_dir("invalidate");
  write_text_file(dir / "g", "g");
  write_text_file(dir / "m", "m");
  write_text_file(dir / "t", "t");
  RunManifest m;
  m.graph_done = m.mesh_done = m.texture_done = true;
  m.record(dir, "g", Stage::kGraph);
  m.record(dir, "m", Stage::kMesh);
  m.record(dir, "t", Stage::kTexture);
  m.invalidate_from(Stage::kMesh);
  CHECK(m.graph_done);
  CHECK_FALSE(m.mesh_done);
  CHECK_FALSE(m.texture_done);
  CHECK(m.files_of(Stage::kGraph) == std::vector<std::string>{"g"});
  CHECK(m.files_of(Stage::kMesh).empty());
}

TEST_CASE("minimal config fills defaults") {
  const PipelineConfig c = config_from_json(nlohmann::json{{"seed", 9}, {"node_count_target", 30}});
  PipelineConfig expected = default_config(9);
  expected.graph.node_count_target = 30;
  CHECK(c == expected);
  CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("config errors name their keys") {
  auto message = [](const nlohmann::json& j) -> std::string {
    try {
      config_from_json(j);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  const std::string range = message({{"graph", {{"radius_min", 9.0}, {"radius_max", 5.0}}}});
  CHECK(range.find("radius_min") != std::string::npos);
  CHECK(range.find("radius_max") != std::string::npos);
  CHECK(message({{"mesh", {{"voxel", 1.0}}}}).find("/mesh/voxel") != std::string::npos);
  CHECK(message({{"colour", 1}}).find("/colour") != std::string::npos);
  CHECK(message({{"texture_resolution", 1000}}).find("texture_resolution") != std::string::npos);
  CHECK(message({{"output_formats", nlohmann::json::array()}}).find("output_formats") != std::string::npos);
  CHECK(message({{"seed", 1}, {"graph", {{"seed", 2}}}}).find("/graph/seed") != std::string::npos);
  CHECK(message({{"mesh", {{"voxel_size", 3.0}}}}).find("voxel_size") != std::string::npos);
}

TEST_CASE("grid preset names resolve") {
  const auto names = preset_names();
  CHECK(names.size() == 16);
  const PipelineConfig single = preset("single_50n_1k");
  CHECK(single.graph.node_count_target == 50);
  CHECK(single.graph.layers == 1);
  CHECK(single.texture_resolution == 1024);
  CHECK(single.mesh.chunk_grid == std::array<int, 3>{1, 1, 1});
  const PipelineConfig multi = preset("multi_250n_4k_4div");
  CHECK(multi.graph.node_count_target == 250);
  CHECK(multi.graph.layers > 1);
  CHECK(multi.texture_resolution == 4096);
  CHECK(multi.mesh.chunk_grid == std::array<int, 3>{2, 2, 2});
  CHECK(preset("single_250n_1k_4div").mesh.chunk_grid == std::array<int, 3>{2, 2, 1});
  try {
    preset("double_50n_1k");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("single_50n_1k") != std::string::npos);
  }
  for (const auto& n : names) CHECK_NOTHROW(preset(n).validate());
  CHECK(load_config("single_50n_4k") == preset("single_50n_4k"));
  CHECK(config_from_json({{"preset", "multi_50n_1k"}, {"seed", 3}}).graph.layers == preset("multi_50n_1k").graph.layers);
}
