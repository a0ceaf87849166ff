#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plume/mesh.hpp"

namespace plume {

namespace fs = std::filesystem;

/// Axis convention of exported files. Internally +Z is up; Y-up files store (x, z, -y).
struct ExportOptions {
  bool z_up = false;
};

/// "chunk_i_j_k".
std::string chunk_stem(const Chunk& chunk);

/// Writes chunk_i_j_k.obj and chunk_i_j_k.mtl per chunk plus the AXES.txt note. The material
/// references texture maps only for chunks that carry textures. Returns the written files.
std::vector<fs::path> export_obj(const std::vector<Chunk>& chunks, const fs::path& dir, const ExportOptions& options);
/// Material file for one chunk; `with_maps` adds the colour, bump and roughness maps.
fs::path write_mtl(const Chunk& chunk, const fs::path& dir, bool with_maps);

/// Binary little-endian PLY per chunk: double positions, float normals and a per-face
/// "texcoord" list holding the three corner UVs.
std::vector<fs::path> export_ply(const std::vector<Chunk>& chunks, const fs::path& dir, const ExportOptions& options);

/// Colour, normal and roughness PNGs of a textured chunk.
std::vector<fs::path> write_textures(const Chunk& chunk, const fs::path& dir);

/// Importers for the files written above; positions come back in the internal Z-up frame.
TriMesh read_obj(const fs::path& file, const ExportOptions& options);
TriMesh read_ply(const fs::path& file, const ExportOptions& options);

/// Lossless binary snapshot of a chunk's geometry (textures excluded).
void write_chunk_cache(const Chunk& chunk, const fs::path& file);
Chunk read_chunk_cache(const fs::path& file);

/// Documents the axis convention of the exported files.
fs::path write_axes_note(const fs::path& dir, const ExportOptions& options);

}  // namespace plume
