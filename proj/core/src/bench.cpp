#include "plume/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <sys/utsname.h>

#include "plume/error.hpp"
#include "plume/parallel.hpp"

namespace plume {

namespace fs = std::filesystem;

const char* const kBenchRows[4] = {"Single (no chunks)", "Multi (no chunks)", "Single (4 division)",
                                   "Multi (4 division)"};
const char* const kBenchCols[4] = {"50N(1K)", "50N(4K)", "250N(1K)", "250N(4K)"};

namespace {

std::string read_proc_field(const char* file, const std::string& key) {
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) != 0) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string v = line.substr(colon + 1);
    v.erase(0, v.find_first_not_of(" \t"));
    return v;
  }
  return "unknown";
}

TimingStats stats(const std::vector<double>& xs) {
  TimingStats s;
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (const double x : xs) sum += x;
  s.mean = std::clamp(sum / static_cast<double>(xs.size()), s.min, s.max);
  return s;
}

std::string format_seconds(double s) {
  char buf[32];
  const int minutes = static_cast<int>(s / 60.0);
  std::snprintf(buf, sizeof buf, "%02dm%05.2fs", minutes, s - 60.0 * minutes);
  return buf;
}

}  // namespace

std::pair<int, int> bench_cell(const std::string& name) {
  const PipelineConfig c = preset(name);
  const bool multi = c.graph.layers > 1;
  const bool divided = c.mesh.chunk_grid != std::array<int, 3>{1, 1, 1};
  const int row = (divided ? 2 : 0) + (multi ? 1 : 0);
  const int col = (c.graph.node_count_target == 250 ? 2 : 0) + (c.texture_resolution == 4096 ? 1 : 0);
  return {row, col};
}

nlohmann::json hardware_metadata() {
  utsname u{};
  std::string os = "unknown";
  if (uname(&u) == 0) os = std::string(u.sysname) + " " + u.release + " " + u.machine;
  return {{"cpu", read_proc_field("/proc/cpuinfo", "model name")},
          {"logical_cores", std::thread::hardware_concurrency()},
          {"threads_used", thread_count()},
          {"memory", read_proc_field("/proc/meminfo", "MemTotal")},
          {"os", os},
          {"compiler", std::string(
#if defined(__clang__)
                           "clang "
#elif defined(__GNUC__)
                           "gcc "
#endif
                           ) + __VERSION__},
          {"tool_version", tool_version()}};
}

BenchReport bench(const std::vector<std::string>& presets, int repetitions, const fs::path& work_dir, const LogFn& log) {
  if (repetitions < 1) throw ConfigError("--reps must be >= 1");
  for (const auto& p : presets) preset(p);  // reject unknown names before running anything

  BenchReport report;
  report.hardware = hardware_metadata();
  for (const std::string& name : presets) {
    const PipelineConfig config = preset(name);
    BenchEntry e;
    e.preset = name;
    std::tie(e.row, e.col) = bench_cell(name);
    e.repetitions = repetitions;
    std::map<std::string, std::vector<double>> samples;
    for (int r = 0; r < repetitions; ++r) {
      if (log) log("bench: " + name + " repetition " + std::to_string(r + 1) + "/" + std::to_string(repetitions));
      RunOptions o;
      o.output_dir = work_dir / name;
      const RunResult res = run_pipeline(config, o);
      double total = 0.0;
      for (const auto& [stage, secs] : res.seconds) {
        samples[stage].push_back(secs);
        total += secs;
      }
      samples["total"].push_back(total);
      e.artifact_bytes = 0;
      for (const auto& a : res.manifest.artifacts) e.artifact_bytes += a.bytes;
      e.nodes = res.node_count;
      e.triangles = res.triangles;
      e.chunks = res.chunk_count;
    }
    for (const auto& [stage, xs] : samples) e.seconds[stage] = stats(xs);
    report.entries.push_back(std::move(e));
  }

  // Chunked vs unchunked texture time, reported for every twin pair that was run.
  for (const BenchEntry& chunked : report.entries) {
    if (chunked.row < 2) continue;
    for (const BenchEntry& plain : report.entries) {
      if (plain.row != chunked.row - 2 || plain.col != chunked.col) continue;
      const double a = chunked.seconds.at("texture").mean;
      const double b = plain.seconds.at("texture").mean;
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: texture stage %.3f s with chunks vs %.3f s without (%s)",
                    chunked.preset.c_str(), a, b, a > b ? "chunked slower" : "chunked not slower on this machine");
      report.notes.emplace_back(buf);
    }
  }
  return report;
}

nlohmann::json bench_report_to_json(const BenchReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const BenchEntry& e : report.entries) {
    nlohmann::json secs = nlohmann::json::object();
    for (const auto& [stage, s] : e.seconds) secs[stage] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
    entries.push_back({{"preset", e.preset},
                       {"row", kBenchRows[e.row]},
                       {"column", kBenchCols[e.col]},
                       {"repetitions", e.repetitions},
                       {"seconds", secs},
                       {"artifact_bytes", e.artifact_bytes},
                       {"nodes", e.nodes},
                       {"triangles", e.triangles},
                       {"chunks", e.chunks}});
  }
  return {{"hardware", report.hardware},
          {"rows", std::vector<std::string>(kBenchRows, kBenchRows + 4)},
          {"columns", std::vector<std::string>(kBenchCols, kBenchCols + 4)},
          {"entries", entries},
          {"notes", report.notes}};
}

std::string bench_table(const BenchReport& report) {
  std::string cells[4][4];
  for (auto& row : cells) {
    for (auto& c : row) c = "-";
  }
  for (const BenchEntry& e : report.entries) cells[e.row][e.col] = format_seconds(e.seconds.at("total").mean);

  std::size_t first = std::string("Parameters").size();
  for (const char* r : kBenchRows) first = std::max(first, std::string(r).size());
  std::size_t width = 0;
  for (const char* c : kBenchCols) width = std::max(width, std::string(c).size());
  for (auto& row : cells) {
    for (auto& c : row) width = std::max(width, c.size());
  }
  const auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  std::ostringstream out;
  out << pad("Parameters", first);
  for (const char* c : kBenchCols) out << " | " << pad(c, width);
  out << "\n" << std::string(first, '-');
  for (int c = 0; c < 4; ++c) out << "-+-" << std::string(width, '-');
  out << "\n";
  for (int r = 0; r < 4; ++r) {
    out << pad(kBenchRows[r], first);
    for (int c = 0; c < 4; ++c) out << " | " << pad(cells[r][c], width);
    out << "\n";
  }
  out << "\nHardware: " << report.hardware.value("cpu", std::string("unknown")) << ", "
      << report.hardware.value("logical_cores", 0u) << " logical cores, "
      << report.hardware.value("threads_used", 0u) << " worker threads, "
      << report.hardware.value("os", std::string("unknown")) << "\n";
  out << "Timings are wall-clock means of the whole pipeline on this machine.\n";
  for (const auto& n : report.notes) out << "Note: " << n << "\n";
  return out.str();
}

}  // namespace plume
