#include "plume/mesh_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "plume/error.hpp"

namespace plume {

namespace {

Vec3 to_file(const Vec3& p, const ExportOptions& o) { return o.z_up ? p : Vec3{p.x, p.z, -p.y}; }
Vec3 from_file(const Vec3& p, const ExportOptions& o) { return o.z_up ? p : Vec3{p.x, -p.z, p.y}; }

void append_g9(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.9g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

void write_binary(const fs::path& file, const std::string& bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + file.string());
}

std::string read_binary(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Little-endian encoding independent of the host byte order.
template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
void put_f32(std::string& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }
void put_u32(std::string& out, std::uint32_t v) { put_le(out, v); }
void put_i32(std::string& out, std::int32_t v) { put_le(out, static_cast<std::uint32_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t pos, std::string name)
      : bytes_(bytes), pos_(pos), name_(std::move(name)) {}
  template <typename U>
  U le() {
    if (pos_ + sizeof(U) > bytes_.size()) throw ParseError(name_ + ": unexpected end of file");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(le<std::uint32_t>()); }
  std::uint8_t u8() { return le<std::uint8_t>(); }
  [[nodiscard]] bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_;
  std::string name_;
};

constexpr char kCacheMagic[8] = {'P', 'L', 'U', 'M', 'E', 'C', 'K', '1'};

}  // namespace

std::string chunk_stem(const Chunk& chunk) {
  return "chunk_" + std::to_string(chunk.index[0]) + "_" + std::to_string(chunk.index[1]) + "_" +
         std::to_string(chunk.index[2]);
}

fs::path write_mtl(const Chunk& chunk, const fs::path& dir, bool with_maps) {
  const std::string stem = chunk_stem(chunk);
  std::string s;
  s += "# plume material for " + stem + "\n";
  s += "newmtl " + stem + "\n";
  s += "Ka 0 0 0\nKd 1 1 1\nKs 0 0 0\nNs 10\nd 1\nillum 1\n";
  if (with_maps) {
    s += "map_Kd " + stem + "_color.png\n";
    s += "map_Bump -bm 1.0 " + stem + "_normal.png\n";
    s += "map_Pr " + stem + "_roughness.png\n";
  }
  const fs::path file = dir / (stem + ".mtl");
  write_binary(file, s);
  return file;
}

std::vector<fs::path> export_obj(const std::vector<Chunk>& chunks, const fs::path& dir, const ExportOptions& options) {
  std::vector<fs::path> files;
  if (chunks.empty()) return files;
  ensure_dir(dir);
  for (const Chunk& chunk : chunks) {
    const TriMesh& m = chunk.mesh;
    const std::string stem = chunk_stem(chunk);
    const bool uvs = m.has_uvs();
    const bool normals = m.normals.size() == m.positions.size();

    std::string s;
    s.reserve(m.positions.size() * 96 + m.triangles.size() * 64);
    s += "# plume " + stem + "\n";
    s += "mtllib " + stem + ".mtl\n";
    s += "o " + stem + "\n";
    for (const Vec3& p : m.positions) {
      const Vec3 q = to_file(p, options);
      s += "v ";
      append_g9(s, q.x);
      s += ' ';
      append_g9(s, q.y);
      s += ' ';
      append_g9(s, q.z);
      s += '\n';
    }
    // Texture coordinates are shared between corners with identical bits.
    std::vector<std::array<std::uint32_t, 3>> corner_vt;
    if (uvs) {
      std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> index;
      corner_vt.resize(m.triangles.size());
      for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        for (std::size_t c = 0; c < 3; ++c) {
          const Vec2& uv = m.uvs[t][c];
          const auto key = std::make_pair(std::bit_cast<std::uint64_t>(uv.x), std::bit_cast<std::uint64_t>(uv.y));
          const auto [it, fresh] = index.emplace(key, static_cast<std::uint32_t>(index.size() + 1));
          if (fresh) {
            s += "vt ";
            append_g9(s, uv.x);
            s += ' ';
            append_g9(s, uv.y);
            s += '\n';
          }
          corner_vt[t][c] = it->second;
        }
      }
    }
    if (normals) {
      for (const Vec3& n : m.normals) {
        const Vec3 q = to_file(n, options);
        s += "vn ";
        append_g9(s, q.x);
        s += ' ';
        append_g9(s, q.y);
        s += ' ';
        append_g9(s, q.z);
        s += '\n';
      }
    }
    s += "usemtl " + stem + "\n";
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      s += 'f';
      for (std::size_t c = 0; c < 3; ++c) {
        const std::string v = std::to_string(m.triangles[t][c] + 1);
        s += ' ';
        s += v;
        if (uvs || normals) {
          s += '/';
          if (uvs) s += std::to_string(corner_vt[t][c]);
          if (normals) {
            s += '/';
            s += v;
          }
        }
      }
      s += '\n';
    }
    const fs::path obj = dir / (stem + ".obj");
    write_binary(obj, s);
    files.push_back(obj);
    files.push_back(write_mtl(chunk, dir, chunk.textures.has_value()));
  }
  files.push_back(write_axes_note(dir, options));
  return files;
}

std::vector<fs::path> export_ply(const std::vector<Chunk>& chunks, const fs::path& dir, const ExportOptions& options) {
  std::vector<fs::path> files;
  if (chunks.empty()) return files;
  ensure_dir(dir);
  for (const Chunk& chunk : chunks) {
    const TriMesh& m = chunk.mesh;
    const std::string stem = chunk_stem(chunk);
    const bool uvs = m.has_uvs();
    std::string s;
    s += "ply\nformat binary_little_endian 1.0\n";
    s += "comment plume " + stem + "\n";
    s += std::string("comment axes ") + (options.z_up ? "z-up" : "y-up") + "\n";
    s += "element vertex " + std::to_string(m.positions.size()) + "\n";
    s += "property double x\nproperty double y\nproperty double z\n";
    s += "property float nx\nproperty float ny\nproperty float nz\n";
    s += "element face " + std::to_string(m.triangles.size()) + "\n";
    s += "property list uchar int vertex_indices\n";
    if (uvs) s += "property list uchar float texcoord\n";
    s += "end_header\n";
    for (std::size_t v = 0; v < m.positions.size(); ++v) {
      const Vec3 p = to_file(m.positions[v], options);
      const Vec3 n = to_file(v < m.normals.size() ? m.normals[v] : Vec3{}, options);
      put_f64(s, p.x);
      put_f64(s, p.y);
      put_f64(s, p.z);
      put_f32(s, static_cast<float>(n.x));
      put_f32(s, static_cast<float>(n.y));
      put_f32(s, static_cast<float>(n.z));
    }
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      s.push_back(3);
      for (const std::uint32_t i : m.triangles[t]) put_i32(s, static_cast<std::int32_t>(i));
      if (uvs) {
        s.push_back(6);
        for (const Vec2& uv : m.uvs[t]) {
          put_f32(s, static_cast<float>(uv.x));
          put_f32(s, static_cast<float>(uv.y));
        }
      }
    }
    const fs::path ply = dir / (stem + ".ply");
    write_binary(ply, s);
    files.push_back(ply);
  }
  return files;
}

std::vector<fs::path> write_textures(const Chunk& chunk, const fs::path& dir) {
  if (!chunk.textures) throw ContractViolation("write_textures: " + chunk_stem(chunk) + " has no baked textures");
  ensure_dir(dir);
  const std::string stem = chunk_stem(chunk);
  std::vector<fs::path> files{dir / (stem + "_color.png"), dir / (stem + "_normal.png"),
                              dir / (stem + "_roughness.png")};
  write_png(files[0], chunk.textures->color);
  write_png(files[1], chunk.textures->normal);
  write_png(files[2], chunk.textures->roughness);
  return files;
}

TriMesh read_obj(const fs::path& file, const ExportOptions& options) {
  const std::string text = read_binary(file);
  TriMesh m;
  std::vector<Vec2> vts;
  std::vector<Vec3> vns;
  std::vector<std::array<int, 3>> vt_of_face;
  std::vector<std::array<int, 3>> vn_of_face;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) {
    throw ParseError(file.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  const auto parse_double = [&](std::istringstream& ls) {
    double v = 0.0;
    if (!(ls >> v)) fail("expected a number");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      const double x = parse_double(ls), y = parse_double(ls), z = parse_double(ls);
      m.positions.push_back(from_file({x, y, z}, options));
    } else if (tag == "vt") {
      const double u = parse_double(ls), v = parse_double(ls);
      vts.push_back({u, v});
    } else if (tag == "vn") {
      const double x = parse_double(ls), y = parse_double(ls), z = parse_double(ls);
      vns.push_back(from_file({x, y, z}, options));
    } else if (tag == "f") {
      Triangle tri{};
      std::array<int, 3> vt{0, 0, 0};
      std::array<int, 3> vn{0, 0, 0};
      for (std::size_t c = 0; c < 4; ++c) {
        std::string corner;
        if (!(ls >> corner)) {
          if (c == 3) break;
          fail("face needs three corners");
        }
        if (c == 3) fail("only triangular faces are supported");
        int fields[3] = {0, 0, 0};
        std::size_t start = 0;
        for (int k = 0; k < 3 && start <= corner.size(); ++k) {
          const std::size_t slash = corner.find('/', start);
          const std::string part = corner.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
          if (!part.empty()) {
            const auto res = std::from_chars(part.data(), part.data() + part.size(), fields[k]);
            if (res.ec != std::errc() || res.ptr != part.data() + part.size()) fail("bad face index '" + part + "'");
          }
          if (slash == std::string::npos) break;
          start = slash + 1;
        }
        if (fields[0] <= 0) fail("face vertex index must be positive");
        tri[c] = static_cast<std::uint32_t>(fields[0] - 1);
        vt[c] = fields[1];
        vn[c] = fields[2];
      }
      m.triangles.push_back(tri);
      vt_of_face.push_back(vt);
      vn_of_face.push_back(vn);
    }
  }
  for (const Triangle& t : m.triangles) {
    for (const std::uint32_t i : t) {
      if (i >= m.positions.size()) throw ParseError(file.string() + ": face index out of range");
    }
  }
  const bool all_vt = !m.triangles.empty() && std::all_of(vt_of_face.begin(), vt_of_face.end(), [&](const auto& f) {
    return f[0] > 0 && f[1] > 0 && f[2] > 0 && static_cast<std::size_t>(std::max({f[0], f[1], f[2]})) <= vts.size();
  });
  if (all_vt) {
    m.uvs.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      for (std::size_t c = 0; c < 3; ++c) m.uvs[t][c] = vts[static_cast<std::size_t>(vt_of_face[t][c] - 1)];
    }
  }
  if (vns.size() == m.positions.size()) m.normals = vns;
  return m;
}

TriMesh read_ply(const fs::path& file, const ExportOptions& options) {
  const std::string bytes = read_binary(file);
  const std::size_t end = bytes.find("end_header\n");
  if (bytes.rfind("ply\n", 0) != 0 || end == std::string::npos) throw ParseError(file.string() + ": not a PLY file");
  std::istringstream header(bytes.substr(0, end));
  std::string line;
  std::size_t vertices = 0;
  std::size_t faces = 0;
  bool texcoord = false;
  bool binary_le = false;
  std::vector<std::string> vertex_props;
  std::string element;
  while (std::getline(header, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (word == "element") {
      std::size_t n = 0;
      ls >> element >> n;
      if (element == "vertex") vertices = n;
      if (element == "face") faces = n;
    } else if (word == "property" && element == "vertex") {
      std::string type, name;
      ls >> type >> name;
      vertex_props.push_back(type + " " + name);
    } else if (word == "property" && element == "face") {
      std::string list, count_type, item_type, name;
      ls >> list >> count_type >> item_type >> name;
      if (name == "texcoord") texcoord = true;
    }
  }
  const std::vector<std::string> expected{"double x", "double y", "double z", "float nx", "float ny", "float nz"};
  if (!binary_le || vertex_props != expected) {
    throw ParseError(file.string() + ": unsupported PLY layout (expected plume binary little-endian chunk)");
  }
  Reader r(bytes, end + std::strlen("end_header\n"), file.string());
  TriMesh m;
  m.positions.resize(vertices);
  m.normals.resize(vertices);
  for (std::size_t v = 0; v < vertices; ++v) {
    const double x = r.f64(), y = r.f64(), z = r.f64();
    m.positions[v] = from_file({x, y, z}, options);
    const double nx = r.f32(), ny = r.f32(), nz = r.f32();
    m.normals[v] = from_file({nx, ny, nz}, options);
  }
  m.triangles.resize(faces);
  if (texcoord) m.uvs.resize(faces);
  for (std::size_t f = 0; f < faces; ++f) {
    if (r.u8() != 3) throw ParseError(file.string() + ": face " + std::to_string(f) + " is not a triangle");
    for (std::size_t c = 0; c < 3; ++c) {
      const std::int32_t i = r.i32();
      if (i < 0 || static_cast<std::size_t>(i) >= vertices) {
        throw ParseError(file.string() + ": face " + std::to_string(f) + " index out of range");
      }
      m.triangles[f][c] = static_cast<std::uint32_t>(i);
    }
    if (texcoord) {
      if (r.u8() != 6) throw ParseError(file.string() + ": face " + std::to_string(f) + " texcoord list must hold 6 values");
      for (std::size_t c = 0; c < 3; ++c) {
        const double u = r.f32(), v = r.f32();
        m.uvs[f][c] = {u, v};
      }
    }
  }
  if (!r.at_end()) throw ParseError(file.string() + ": trailing bytes after face data");
  return m;
}

void write_chunk_cache(const Chunk& chunk, const fs::path& file) {
  const TriMesh& m = chunk.mesh;
  std::string s(kCacheMagic, sizeof kCacheMagic);
  for (const int i : chunk.index) put_i32(s, i);
  for (const Vec3& p : {chunk.bounds.lo, chunk.bounds.hi}) {
    put_f64(s, p.x);
    put_f64(s, p.y);
    put_f64(s, p.z);
  }
  s.push_back(m.closed ? 1 : 0);
  const bool normals = m.normals.size() == m.positions.size();
  s.push_back(normals ? 1 : 0);
  s.push_back(m.has_uvs() ? 1 : 0);
  put_u32(s, static_cast<std::uint32_t>(m.positions.size()));
  put_u32(s, static_cast<std::uint32_t>(m.triangles.size()));
  for (const Vec3& p : m.positions) {
    put_f64(s, p.x);
    put_f64(s, p.y);
    put_f64(s, p.z);
  }
  if (normals) {
    for (const Vec3& n : m.normals) {
      put_f64(s, n.x);
      put_f64(s, n.y);
      put_f64(s, n.z);
    }
  }
  for (const Triangle& t : m.triangles) {
    for (const std::uint32_t i : t) put_u32(s, i);
  }
  if (m.has_uvs()) {
    for (const auto& corners : m.uvs) {
      for (const Vec2& uv : corners) {
        put_f64(s, uv.x);
        put_f64(s, uv.y);
      }
    }
  }
  ensure_dir(file.parent_path());
  write_binary(file, s);
}

Chunk read_chunk_cache(const fs::path& file) {
  const std::string bytes = read_binary(file);
  if (bytes.size() < sizeof kCacheMagic || std::memcmp(bytes.data(), kCacheMagic, sizeof kCacheMagic) != 0) {
    throw ParseError(file.string() + ": not a plume chunk cache");
  }
  Reader r(bytes, sizeof kCacheMagic, file.string());
  Chunk c;
  for (int& i : c.index) i = r.i32();
  for (Vec3* p : {&c.bounds.lo, &c.bounds.hi}) {
    p->x = r.f64();
    p->y = r.f64();
    p->z = r.f64();
  }
  TriMesh& m = c.mesh;
  m.closed = r.u8() != 0;
  const bool normals = r.u8() != 0;
  const bool uvs = r.u8() != 0;
  const std::uint32_t nv = r.u32();
  const std::uint32_t nt = r.u32();
  m.positions.resize(nv);
  for (Vec3& p : m.positions) {
    p.x = r.f64();
    p.y = r.f64();
    p.z = r.f64();
  }
  if (normals) {
    m.normals.resize(nv);
    for (Vec3& n : m.normals) {
      n.x = r.f64();
      n.y = r.f64();
      n.z = r.f64();
    }
  }
  m.triangles.resize(nt);
  for (Triangle& t : m.triangles) {
    for (std::uint32_t& i : t) {
      i = r.u32();
      if (i >= nv) throw ParseError(file.string() + ": triangle index out of range");
    }
  }
  if (uvs) {
    m.uvs.resize(nt);
    for (auto& corners : m.uvs) {
      for (Vec2& uv : corners) {
        uv.x = r.f64();
        uv.y = r.f64();
      }
    }
  }
  if (!r.at_end()) throw ParseError(file.string() + ": trailing bytes");
  return c;
}

fs::path write_axes_note(const fs::path& dir, const ExportOptions& options) {
  ensure_dir(dir);
  std::string s;
  if (options.z_up) {
    s = "Axis convention: right-handed, Z up. Coordinates are written as generated (metres).\n";
  } else {
    s = "Axis convention: right-handed, Y up. A generator point (x, y, z) with Z up is written as\n"
        "(x, z, -y). Regenerate with --z-up to keep the original Z-up coordinates.\n";
  }
  const fs::path file = dir / "AXES.txt";
  write_binary(file, s);
  return file;
}

}  // namespace plume
