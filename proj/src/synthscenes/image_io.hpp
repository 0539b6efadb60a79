#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gridood::scenes {

// Binary netpbm writers/readers, 8-bit, maxval 255. Pixel buffers are
// planar [C][H][W] on the API side; interleaving happens at the file
// boundary.

void write_ppm(const std::filesystem::path& path, std::size_t width,
               std::size_t height, std::span<const std::uint8_t> planar_rgb);

void write_pgm(const std::filesystem::path& path, std::size_t width,
               std::size_t height, std::span<const std::uint8_t> gray);

struct PpmImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> planar_rgb;  // [3][H][W]
};

PpmImage read_ppm(const std::filesystem::path& path);

}  // namespace gridood::scenes
