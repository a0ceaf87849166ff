#pragma once

#include <filesystem>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "plume/graph.hpp"

namespace plume {

inline constexpr int kGraphManifestVersion = 1;

nlohmann::json graph_config_to_json(const GraphConfig& config);

/// Strict parse: unknown keys are errors; absent keys keep their defaults. `path` is the JSON
/// pointer of `j` inside the enclosing document, used in error messages.
GraphConfig graph_config_from_json(const nlohmann::json& j, std::string_view path = "");

/// Graph manifest: {version, config, nodes}.
nlohmann::json graph_to_json(const Graph& graph, const GraphConfig& config);

/// Inverse of graph_to_json. Throws ParseError (schema) or ValidationError (invariants).
std::pair<Graph, GraphConfig> json_to_graph(const nlohmann::json& document);

/// Structural checks: ids, single origin, symmetric sorted edges, acyclic parents reaching the
/// origin, radius range and connectivity. Throws ValidationError naming the offending node.
void validate_graph(const Graph& graph, const GraphConfig& config);

void write_graph_manifest(const std::filesystem::path& file, const Graph& graph, const GraphConfig& config);
std::pair<Graph, GraphConfig> read_graph_manifest(const std::filesystem::path& file);

/// Serializes JSON with a trailing newline; the byte layout is stable across runs.
std::string dump_json(const nlohmann::json& j);
void write_text_file(const std::filesystem::path& file, const std::string& content);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace plume
