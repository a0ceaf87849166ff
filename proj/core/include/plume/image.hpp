#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace plume {

/// 8-bit raster, row-major, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, 0) {}

  [[nodiscard]] std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels;
  }
  [[nodiscard]] const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels;
  }
  bool operator==(const Image&) const = default;
};

/// Colour (sRGB), tangent-space normal and roughness maps of one chunk.
struct TextureSet {
  int resolution = 0;
  Image color;      ///< RGB, sRGB-encoded albedo
  Image normal;     ///< RGB, tangent-space, (128,128,255) is flat
  Image roughness;  ///< grayscale, linear
  bool operator==(const TextureSet&) const = default;
};

/// Writes an 8-bit grayscale (1 channel) or RGB (3 channel) PNG. Output bytes are a pure
/// function of the image.
void write_png(const std::filesystem::path& file, const Image& image);
Image read_png(const std::filesystem::path& file);

}  // namespace plume
