#include "synthscenes/image_io.hpp"

#include <fstream>
#include <string>

#include "common.hpp"

namespace gridood::scenes {

void write_ppm(const std::filesystem::path& path, std::size_t width,
               std::size_t height, std::span<const std::uint8_t> planar_rgb) {
  if (planar_rgb.size() != 3 * width * height) {
    throw DimensionError("write_ppm: buffer size does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("write_ppm: cannot open " + path.string());
  }
  out << "P6\n" << width << " " << height << "\n255\n";
  const std::size_t plane = width * height;
  std::vector<std::uint8_t> row(3 * width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      row[3 * x + 0] = planar_rgb[0 * plane + y * width + x];
      row[3 * x + 1] = planar_rgb[1 * plane + y * width + x];
      row[3 * x + 2] = planar_rgb[2 * plane + y * width + x];
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) {
    throw IoError("write_ppm: write failed for " + path.string());
  }
}

void write_pgm(const std::filesystem::path& path, std::size_t width,
               std::size_t height, std::span<const std::uint8_t> gray) {
  if (gray.size() != width * height) {
    throw DimensionError("write_pgm: buffer size does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("write_pgm: cannot open " + path.string());
  }
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()),
            static_cast<std::streamsize>(gray.size()));
  if (!out) {
    throw IoError("write_pgm: write failed for " + path.string());
  }
}

namespace {

// Skips whitespace and '#' comments between header tokens.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

}  // namespace

PpmImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_ppm: cannot open " + path.string());
  }
  if (next_token(in) != "P6") {
    throw IoError("read_ppm: not a binary PPM: " + path.string());
  }
  PpmImage img;
  try {
    img.width = std::stoul(next_token(in));
    img.height = std::stoul(next_token(in));
    const unsigned maxval = static_cast<unsigned>(std::stoul(next_token(in)));
    if (maxval != 255) {
      throw IoError("read_ppm: only maxval 255 is supported");
    }
  } catch (const std::logic_error&) {
    throw IoError("read_ppm: malformed header in " + path.string());
  }
  const std::size_t plane = img.width * img.height;
  std::vector<std::uint8_t> row(3 * img.width);
  img.planar_rgb.resize(3 * plane);
  for (std::size_t y = 0; y < img.height; ++y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
    if (!in) {
      throw IoError("read_ppm: truncated pixel data in " + path.string());
    }
    for (std::size_t x = 0; x < img.width; ++x) {
      img.planar_rgb[0 * plane + y * img.width + x] = row[3 * x + 0];
      img.planar_rgb[1 * plane + y * img.width + x] = row[3 * x + 1];
      img.planar_rgb[2 * plane + y * img.width + x] = row[3 * x + 2];
    }
  }
  return img;
}

}  // namespace gridood::scenes
