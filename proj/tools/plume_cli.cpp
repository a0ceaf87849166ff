// plume: command-line front end for the cave generation pipeline.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plume/bench.hpp"
#include "plume/error.hpp"
#include "plume/graph_io.hpp"
#include "plume/mesh_io.hpp"
#include "plume/parallel.hpp"
#include "plume/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

bool g_quiet = false;

void log_line(const std::string& msg) {
  if (!g_quiet) std::cerr << "[plume] " << msg << "\n";
}

int code(plume::ExitCode c) { return static_cast<int>(c); }

int cmd_generate(const std::string& config, const std::string& stages, bool resume, const std::string& out, bool z_up) {
  plume::RunOptions o;
  o.selector = plume::StageSelector::parse(stages, resume);
  if (!out.empty()) o.output_dir = fs::path(out);
  o.z_up = z_up;
  o.log = log_line;
  const plume::RunResult r = plume::run(config, o);
  log_line("wrote " + std::to_string(r.written.size()) + " file(s) to " + r.output_dir.string());
  return 0;
}

int cmd_preview(const std::string& config, const std::string& kind, const std::string& out) {
  const plume::PipelineConfig c = plume::load_config(config);
  const fs::path dir = out.empty() ? fs::path(c.output_dir) / "preview" : fs::path(out);
  const fs::path file =
      plume::preview(c, kind == "graph" ? plume::PreviewKind::kGraph : plume::PreviewKind::kTexture, dir);
  log_line("preview written to " + file.string());
  return 0;
}

int cmd_bench(std::vector<std::string> presets, int reps, const std::string& report, const std::string& work) {
  if (presets.empty()) presets = plume::preset_names();
  const plume::BenchReport r = plume::bench(presets, reps, work, log_line);
  const fs::path json_path(report);
  if (json_path.has_parent_path()) fs::create_directories(json_path.parent_path());
  plume::write_text_file(json_path, plume::dump_json(plume::bench_report_to_json(r)));
  fs::path table_path = json_path;
  table_path.replace_extension(".txt");
  plume::write_text_file(table_path, plume::bench_table(r));
  log_line("report written to " + json_path.string() + " and " + table_path.string());
  return 0;
}

int cmd_validate(const std::string& dir_arg) {
  const fs::path dir(dir_arg);
  const plume::RunManifest m = plume::load_manifest(dir, false);
  int status = 0;
  const std::vector<std::string> stale = plume::audit_artifacts(m, dir);
  for (const auto& s : stale) log_line("stale artifact: " + s);
  log_line("digest audit: " + std::to_string(m.artifacts.size() - stale.size()) + "/" +
           std::to_string(m.artifacts.size()) + " artifacts match");
  if (!stale.empty()) status = code(plume::ExitCode::kStaleArtifact);

  const plume::ExportOptions eo{m.z_up};
  const std::string prefix = std::string(plume::kChunkCacheDir) + "/";
  for (const std::string& rel : m.files_of(plume::Stage::kMesh)) {
    if (rel.rfind(prefix, 0) != 0 || std::find(stale.begin(), stale.end(), rel) != stale.end()) continue;
    const plume::Chunk chunk = plume::read_chunk_cache(dir / rel);
    const plume::MeshReport r = plume::validate_mesh(chunk.mesh);
    bool ok = r.valid() && (!chunk.mesh.closed || r.closed());
    std::string line = plume::chunk_stem(chunk) + ": " + std::to_string(r.vertex_count) + " vertices, " +
                       std::to_string(r.triangle_count) + " triangles, " + std::to_string(r.components) +
                       " component(s), " + std::to_string(r.boundary_edges) + " boundary edges, " +
                       std::to_string(r.degenerate_triangles) + " degenerate";
    for (const char* ext : {".obj", ".ply"}) {
      const fs::path f = dir / (plume::chunk_stem(chunk) + ext);
      if (!fs::exists(f)) continue;
      const plume::TriMesh back = std::string(ext) == ".obj" ? plume::read_obj(f, eo) : plume::read_ply(f, eo);
      const bool same = back.positions.size() == chunk.mesh.positions.size() &&
                        back.triangles == chunk.mesh.triangles;
      line += std::string(", ") + (ext + 1) + (same ? " ok" : " MISMATCH");
      ok = ok && same;
    }
    log_line(line + (ok ? "" : "  <-- invalid"));
    if (!ok && status == 0) status = code(plume::ExitCode::kInvariant);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plume: procedural underground environment generator"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");
  app.add_flag("-q,--quiet", g_quiet, "Suppress progress messages");

  std::string config;
  std::string stages = "graph,mesh,texture";
  bool resume = false;
  std::string out;
  bool z_up = false;
  auto* gen = app.add_subcommand("generate", "Run pipeline stages");
  gen->add_option("--config", config, "Config file or preset name")->required();
  gen->add_option("--stages", stages, "Comma-separated stages: graph,mesh,texture");
  gen->add_flag("--resume", resume, "Continue an existing output directory");
  gen->add_option("--out", out, "Output directory (overrides output_dir)");
  gen->add_flag("--z-up", z_up, "Keep Z up in exported meshes instead of Y up");
  gen->add_option("--threads", threads, "Worker thread cap (0 = all cores)");

  std::string kind = "graph";
  auto* prev = app.add_subcommand("preview", "Quick look at the skeleton or the material");
  prev->add_option("--config", config, "Config file or preset name")->required();
  prev->add_option("--kind", kind, "graph or texture")->check(CLI::IsMember({"graph", "texture"}));
  prev->add_option("--out", out, "Directory for the preview file");

  std::vector<std::string> presets;
  int reps = 1;
  std::string report = "bench/report.json";
  std::string work = "bench/work";
  auto* bench = app.add_subcommand("bench", "Time the benchmark presets");
  bench->add_option("--preset", presets, "Preset name(s); default is all 16");
  bench->add_option("--reps", reps, "Repetitions per preset")->check(CLI::PositiveNumber);
  bench->add_option("--report", report, "JSON report path; a .txt table is written next to it");
  bench->add_option("--work", work, "Scratch directory for generated artifacts");
  bench->add_option("--threads", threads, "Worker thread cap (0 = all cores)");

  std::string dir;
  auto* val = app.add_subcommand("validate", "Audit digests and mesh invariants of an output directory");
  val->add_option("--dir", dir, "Output directory holding manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(plume::ExitCode::kConfig);
  }

  try {
    plume::set_thread_count(threads);
    if (*gen) return cmd_generate(config, stages, resume, out, z_up);
    if (*prev) return cmd_preview(config, kind, out);
    if (*bench) return cmd_bench(presets, reps, report, work);
    if (*val) return cmd_validate(dir);
  } catch (const plume::StaleArtifactError& e) {
    std::cerr << "plume: " << e.what() << "\n";
    return code(e.exit_code());
  } catch (const plume::Error& e) {
    std::cerr << "plume: " << e.what() << "\n";
    return code(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "plume: " << e.what() << "\n";
    return code(plume::ExitCode::kGeneric);
  }
  return 0;
}
