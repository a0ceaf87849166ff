#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "oracles.hpp"
#include "plume/graph_io.hpp"
#include "plume/manifest.hpp"

namespace fs = std::filesystem;

namespace {

int plume_cli(const std::string& args) {
  const std::string cmd = std::string("'") + PLUME_CLI_PATH + "' -q " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path file = dir / name;
  plume::write_text_file(file, body);
  return file;
}

const char* const kSmallConfig = R"({
  "version": 1,
  "seed": 5,
  "node_count_target": 15,
  "texture_resolution": 256,
  "output_formats": ["obj", "ply"]
})";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(plume_cli("") == 2);
  CHECK(plume_cli("generate") == 2);
  CHECK(plume_cli("frobnicate") == 2);
  CHECK(plume_cli("--help") == 0);
}

TEST_CASE("configuration errors exit with 2") {
  const auto dir = oracle::scratch_dir("cli_config");
  CHECK(plume_cli("generate --config no_such_preset --out " + (dir / "a").string()) == 2);
  const auto bad = write_config(dir, "bad.json", R"({"seed": 1, "grpah": {}})");
  CHECK(plume_cli("generate --config " + bad.string() + " --out " + (dir / "b").string()) == 2);
  const auto range = write_config(dir, "range.json", R"({"graph": {"radius_min": 9, "radius_max": 3}})");
  CHECK(plume_cli("generate --config " + range.string() + " --out " + (dir / "c").string()) == 2);
  const auto good = write_config(dir, "good.json", kSmallConfig);
  CHECK(plume_cli("generate --config " + good.string() + " --stages graph,texture --out " + (dir / "d").string()) ==
        2);
  CHECK(plume_cli("bench --preset nope --work " + (dir / "w").string()) == 2);
}

TEST_CASE("generate, validate and tamper detection") {
  const auto dir = oracle::scratch_dir("cli_run");
  const auto cfg = write_config(dir, "cave.json", kSmallConfig);
  const fs::path out = dir / "out";
  CHECK(plume_cli("generate --config " + cfg.string() + " --stages graph --out " + out.string()) == 0);
  CHECK(plume_cli("generate --config " + cfg.string() + " --stages mesh,texture --resume --out " + out.string()) ==
        0);
  CHECK(plume_cli("validate --dir " + out.string()) == 0);

  const plume::RunManifest m = plume::load_manifest(out);
  REQUIRE(m.texture_done);
  std::string png;
  for (const auto& a : m.artifacts) {
    if (a.stage == plume::Stage::kTexture && a.path.ends_with(".png")) png = a.path;
  }
  REQUIRE_FALSE(png.empty());
  {
    std::fstream f(out / png, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  CHECK(plume_cli("validate --dir " + out.string()) == 3);
  CHECK(plume_cli("generate --config " + cfg.string() + " --stages texture --resume --out " + out.string()) == 3);
}

TEST_CASE("stage gaps exit with 5") {
  const auto dir = oracle::scratch_dir("cli_gap");
  const auto cfg = write_config(dir, "cave.json", kSmallConfig);
  CHECK(plume_cli("generate --config " + cfg.string() + " --stages texture --resume --out " + (dir / "o").string()) ==
        5);
  CHECK(plume_cli("generate --config " + cfg.string() + " --stages graph --out " + (dir / "p").string()) == 0);
  CHECK(plume_cli("generate --config " + cfg.string() + " --stages texture --resume --out " + (dir / "p").string()) ==
        5);
}

TEST_CASE("resource limits exit with 4") {
  const auto dir = oracle::scratch_dir("cli_budget");
  const auto cfg = write_config(dir, "tight.json", R"({"seed": 5, "node_count_target": 15, "mesh": {"cell_budget": 1000}})");
  CHECK(plume_cli("generate --config " + cfg.string() + " --out " + (dir / "o").string()) == 4);
}

TEST_CASE("previews write only their own file") {
  const auto dir = oracle::scratch_dir("cli_preview");
  const auto cfg = write_config(dir, "cave.json", kSmallConfig);
  CHECK(plume_cli("preview --config " + cfg.string() + " --kind graph --out " + dir.string()) == 0);
  CHECK(plume_cli("preview --config " + cfg.string() + " --kind texture --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "preview_graph.ply"));
  CHECK(fs::exists(dir / "preview_texture.png"));
  CHECK_FALSE(fs::exists(dir / plume::kRunManifestFile));
  CHECK(plume_cli("preview --config " + cfg.string() + " --kind mesh --out " + dir.string()) == 2);
}

TEST_CASE("the thread cap does not change the output") {
  const auto dir = oracle::scratch_dir("cli_threads");
  const auto cfg = write_config(dir, "cave.json", kSmallConfig);
  CHECK(plume_cli("generate --config " + cfg.string() + " --threads 1 --out " + (dir / "t1").string()) == 0);
  CHECK(plume_cli("--threads 2 generate --config " + cfg.string() + " --out " + (dir / "t2").string()) == 0);
  CHECK(oracle::tree_contents(dir / "t1", {plume::kRunManifestFile}) ==
        oracle::tree_contents(dir / "t2", {plume::kRunManifestFile}));
}
