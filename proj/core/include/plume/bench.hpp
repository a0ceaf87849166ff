#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plume/pipeline.hpp"

namespace plume {

struct TimingStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// One preset of the 4x4 benchmark grid.
struct BenchEntry {
  std::string preset;
  int row = 0;  ///< Single (no chunks), Multi (no chunks), Single (4 division), Multi (4 division)
  int col = 0;  ///< 50N(1K), 50N(4K), 250N(1K), 250N(4K)
  int repetitions = 0;
  std::map<std::string, TimingStats> seconds;  ///< graph, mesh, texture, total
  std::uint64_t artifact_bytes = 0;
  std::size_t nodes = 0;
  std::size_t triangles = 0;
  std::size_t chunks = 0;
};

struct BenchReport {
  nlohmann::json hardware;
  std::vector<BenchEntry> entries;
  std::vector<std::string> notes;
};

/// Grid position of a preset name; throws ConfigError for unknown names.
std::pair<int, int> bench_cell(const std::string& preset);
extern const char* const kBenchRows[4];
extern const char* const kBenchCols[4];

nlohmann::json hardware_metadata();

/// Runs each preset `repetitions` times inside `work_dir` and collects per-stage wall clock.
BenchReport bench(const std::vector<std::string>& presets, int repetitions, const std::filesystem::path& work_dir,
                  const LogFn& log = {});

nlohmann::json bench_report_to_json(const BenchReport& report);
/// Aligned 4x4 text table of mean total seconds; cells that were not run show "-".
std::string bench_table(const BenchReport& report);

}  // namespace plume
