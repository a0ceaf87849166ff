#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "plume/bench.hpp"
#include "plume/error.hpp"
#include "plume/graph_io.hpp"
#include "plume/image.hpp"
#include "plume/mesh_io.hpp"
#include "plume/parallel.hpp"
#include "plume/pipeline.hpp"

using namespace plume;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config() {
  PipelineConfig c = default_config(21);
  c.graph.node_count_target = 20;
  c.graph.layers = 2;
  c.mesh.chunk_grid = {2, 2, 2};
  c.texture_resolution = 256;
  c.output_formats = {"obj", "ply"};
  return c;
}

RunOptions options_for(const fs::path& dir, std::string_view stages = "graph,mesh,texture", bool resume = false) {
  RunOptions o;
  o.selector = StageSelector::parse(stages, resume);
  o.output_dir = dir;
  return o;
}

const std::set<std::string> kTimingFiles{kRunManifestFile};

// Empty grid cells produce no chunk, so tests pick whichever chunk exists.
std::string first_file(const fs::path& dir, const std::string& suffix) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("chunk_", 0) == 0 && n.size() > suffix.size() && n.ends_with(suffix)) names.push_back(n);
  }
  REQUIRE_FALSE(names.empty());
  std::sort(names.begin(), names.end());
  return names.front();
}

}  // namespace

TEST_CASE("stage selectors must be contiguous and ordered") {
  CHECK(StageSelector::parse("graph,mesh", false).stages == std::vector<Stage>{Stage::kGraph, Stage::kMesh});
  CHECK_THROWS_AS(StageSelector::parse("graph,texture", false), ConfigError);
  CHECK_THROWS_AS(StageSelector::parse("mesh,graph", false), ConfigError);
  CHECK_THROWS_AS(StageSelector::parse("", false), ConfigError);
  CHECK_THROWS_AS(StageSelector::parse("graph,colour", false), ConfigError);
}

TEST_CASE("a full run records every artifact") {
  const auto dir = oracle::scratch_dir("full_run");
  const RunResult r = run_pipeline(small_config(), options_for(dir));
  CHECK_FALSE(r.written.empty());
  CHECK(r.manifest.graph_done);
  CHECK(r.manifest.mesh_done);
  CHECK(r.manifest.texture_done);
  CHECK(r.chunk_count >= 2);
  CHECK(audit_artifacts(load_manifest(dir), dir).empty());
  for (const auto& rec : r.manifest.artifacts) CHECK(fs::exists(dir / rec.path));
  const auto [graph, gc] = read_graph_manifest(dir / kGraphFile);
  CHECK(graph.nodes.size() == r.node_count);
  CHECK(gc == small_config().graph);
  CHECK(read_png(dir / first_file(dir, "_color.png")).width == 256);
}

TEST_CASE("staged runs reproduce the monolithic run byte for byte") {
  const auto mono = oracle::scratch_dir("mono");
  const auto staged = oracle::scratch_dir("staged");
  run_pipeline(small_config(), options_for(mono));
  run_pipeline(small_config(), options_for(staged, "graph"));
  CHECK_FALSE(load_manifest(staged).mesh_done);
  run_pipeline(small_config(), options_for(staged, "mesh", true));
  run_pipeline(small_config(), options_for(staged, "texture", true));
  CHECK(oracle::tree_contents(mono, kTimingFiles) == oracle::tree_contents(staged, kTimingFiles));
  CHECK(load_manifest(mono).artifacts == load_manifest(staged).artifacts);
}

TEST_CASE("rerunning a stage replaces its artifacts") {
  const auto dir = oracle::scratch_dir("rerun");
  run_pipeline(small_config(), options_for(dir));
  const auto before = oracle::tree_contents(dir, kTimingFiles);
  run_pipeline(small_config(), options_for(dir, "mesh,texture", true));
  CHECK(oracle::tree_contents(dir, kTimingFiles) == before);
}

TEST_CASE("output is independent of the thread count") {
  const auto one = oracle::scratch_dir("threads_1");
  const auto three = oracle::scratch_dir("threads_3");
  set_thread_count(1);
  run_pipeline(small_config(), options_for(one));
  set_thread_count(3);
  run_pipeline(small_config(), options_for(three));
  set_thread_count(0);
  CHECK(oracle::tree_contents(one, kTimingFiles) == oracle::tree_contents(three, kTimingFiles));
}

TEST_CASE("resume rejects stale and missing upstream artifacts") {
  const auto dir = oracle::scratch_dir("resume_checks");
  run_pipeline(small_config(), options_for(dir, "graph,mesh"));

  SUBCASE("deleted chunk") {
    const std::string victim = first_file(dir, ".obj");
    fs::remove(dir / victim);
    try {
      run_pipeline(small_config(), options_for(dir, "texture", true));
      FAIL("expected StaleArtifactError");
    } catch (const StaleArtifactError& e) {
      CHECK(e.file() == victim);
    }
  }
  SUBCASE("edited graph") {
    std::ofstream(dir / kGraphFile, std::ios::app) << " ";
    CHECK_THROWS_AS(run_pipeline(small_config(), options_for(dir, "mesh", true)), StaleArtifactError);
  }
  SUBCASE("different configuration") {
    PipelineConfig other = small_config();
    other.texture_resolution = 512;
    CHECK_THROWS_AS(run_pipeline(other, options_for(dir, "texture", true)), ConfigError);
  }
  SUBCASE("different axis convention") {
    RunOptions o = options_for(dir, "texture", true);
    o.z_up = true;
    CHECK_THROWS_AS(run_pipeline(small_config(), o), ConfigError);
  }
}

TEST_CASE("stage gaps are contract violations") {
  const auto dir = oracle::scratch_dir("gap");
  run_pipeline(small_config(), options_for(dir, "graph"));
  CHECK_THROWS_AS(run_pipeline(small_config(), options_for(dir, "texture", true)), ContractViolation);
  CHECK_THROWS_AS(run_pipeline(small_config(), options_for(dir, "mesh")), ContractViolation);
  const auto empty = oracle::scratch_dir("gap_empty");
  CHECK_THROWS_AS(run_pipeline(small_config(), options_for(empty, "mesh", true)), ContractViolation);
}

TEST_CASE("only the requested formats are written") {
  PipelineConfig c = small_config();
  c.output_formats = {"ply"};
  const auto dir = oracle::scratch_dir("ply_only");
  run_pipeline(c, options_for(dir, "graph,mesh"));
  const std::string ply = first_file(dir, ".ply");
  CHECK_FALSE(fs::exists(dir / (ply.substr(0, ply.size() - 4) + ".obj")));
}

TEST_CASE("previews are side-effect free") {
  const auto dir = oracle::scratch_dir("preview");
  const PipelineConfig c = small_config();
  const fs::path ply = preview(c, PreviewKind::kGraph, dir);
  std::ifstream in(ply);
  std::string line;
  std::size_t vertices = 0;
  while (std::getline(in, line)) {
    if (line.rfind("element vertex ", 0) == 0) vertices = std::stoul(line.substr(15));
  }
  CHECK(vertices == generate_graph(c.graph).nodes.size());
  CHECK_FALSE(fs::exists(dir / kRunManifestFile));

  const fs::path png = preview(c, PreviewKind::kTexture, dir);
  const std::string first = oracle::read_bytes(png);
  CHECK(read_png(png).width == kProofSheetSize);
  preview(c, PreviewKind::kTexture, dir);
  CHECK(oracle::read_bytes(png) == first);
  CHECK_FALSE(fs::exists(dir / kRunManifestFile));
  CHECK_FALSE(fs::exists(dir / kGraphFile));
}

TEST_CASE("bench grid layout") {
  CHECK(bench_cell("single_50n_1k") == std::pair{0, 0});
  CHECK(bench_cell("multi_50n_4k") == std::pair{1, 1});
  CHECK(bench_cell("single_250n_1k_4div") == std::pair{2, 2});
  CHECK(bench_cell("multi_250n_4k_4div") == std::pair{3, 3});
  CHECK_THROWS_AS(bench_cell("tiny"), ConfigError);
  CHECK(std::string(kBenchRows[0]) == "Single (no chunks)");
  CHECK(std::string(kBenchCols[3]) == "250N(4K)");
}

TEST_CASE("bench statistics are ordered") {
  const auto dir = oracle::scratch_dir("bench");
  const BenchReport r = bench({"single_50n_1k"}, 3, dir);
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].repetitions == 3);
  for (const auto& [stage, s] : r.entries[0].seconds) {
    CHECK(s.min <= s.mean);
    CHECK(s.mean <= s.max);
  }
  CHECK(r.entries[0].seconds.count("total") == 1);
  CHECK(r.hardware.contains("cpu"));
  const std::string table = bench_table(r);
  for (const char* row : kBenchRows) CHECK(table.find(row) != std::string::npos);
  for (const char* col : kBenchCols) CHECK(table.find(col) != std::string::npos);
  const auto j = bench_report_to_json(r);
  CHECK(j.contains("hardware"));
  CHECK(j.contains("entries"));
}
