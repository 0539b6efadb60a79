#include "synthscenes/scenes.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace gridood::scenes {

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

// Base colors stay well away from the background gray band so object pixels
// are always distinguishable from noise. Two foreign shapes reuse hues of
// annotated classes (shape is then the only separating cue), two get hues of
// their own.
Rgb base_color(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::circle:
      return {220, 60, 60};
    case ShapeKind::square:
      return {70, 190, 80};
    case ShapeKind::triangle:
      return {70, 90, 220};
    case ShapeKind::plus:
      return {230, 210, 60};
    case ShapeKind::ring:
      return {225, 75, 75};
    case ShapeKind::star:
      return {200, 70, 210};
    case ShapeKind::cross:
      return {75, 200, 200};
    case ShapeKind::crescent:
      return {225, 200, 70};
  }
  return {255, 255, 255};
}

std::array<std::uint8_t, 3> jitter_color(Rgb base, SplitMix64& rng) {
  std::array<std::uint8_t, 3> out{};
  const double channels[3] = {static_cast<double>(base.r),
                              static_cast<double>(base.g),
                              static_cast<double>(base.b)};
  for (int i = 0; i < 3; ++i) {
    const double factor = 1.0 + 0.1 * (2.0 * rng.uniform() - 1.0);
    const double v = std::clamp(channels[i] * factor, 0.0, 255.0);
    out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(std::lround(v));
  }
  return out;
}

bool point_in_star(double u, double v) {
  // Five-pointed star: 10-gon with radii alternating 1 and 0.382, apex up
  // (negative v in image coordinates). Even-odd ray casting.
  constexpr int kVerts = 10;
  double px[kVerts], py[kVerts];
  for (int i = 0; i < kVerts; ++i) {
    const double r = (i % 2 == 0) ? 1.0 : 0.382;
    const double a = -1.5707963267948966 + i * 0.6283185307179586;
    px[i] = r * std::cos(a);
    py[i] = r * std::sin(a);
  }
  bool inside = false;
  for (int i = 0, j = kVerts - 1; i < kVerts; j = i++) {
    const bool crosses = (py[i] > v) != (py[j] > v);
    if (crosses &&
        u < (px[j] - px[i]) * (v - py[i]) / (py[j] - py[i]) + px[i]) {
      inside = !inside;
    }
  }
  return inside;
}

}  // namespace

bool shape_contains(ShapeKind kind, double u, double v) {
  const double r2 = u * u + v * v;
  switch (kind) {
    case ShapeKind::circle:
      return r2 <= 1.0;
    case ShapeKind::square:
      return std::fabs(u) <= 1.0 && std::fabs(v) <= 1.0;
    case ShapeKind::triangle:
      // Apex at (0,-1), base corners (-1,1) and (1,1).
      return v <= 1.0 && std::fabs(u) <= (v + 1.0) * 0.5;
    case ShapeKind::plus:
      return (std::fabs(u) <= 1.0 / 3.0 && std::fabs(v) <= 1.0) ||
             (std::fabs(v) <= 1.0 / 3.0 && std::fabs(u) <= 1.0);
    case ShapeKind::ring:
      return r2 <= 1.0 && r2 >= 0.55 * 0.55;
    case ShapeKind::star:
      return point_in_star(u, v);
    case ShapeKind::cross:
      return std::fabs(u) <= 1.0 && std::fabs(v) <= 1.0 &&
             (std::fabs(u - v) <= 0.5 || std::fabs(u + v) <= 0.5);
    case ShapeKind::crescent: {
      const double du = u - 0.55;
      return r2 <= 1.0 && du * du + v * v >= 0.75 * 0.75;
    }
  }
  return false;
}

ShapeKind shape_from_name(const std::string& name) {
  static const std::pair<const char*, ShapeKind> table[] = {
      {"circle", ShapeKind::circle},     {"square", ShapeKind::square},
      {"triangle", ShapeKind::triangle}, {"plus", ShapeKind::plus},
      {"ring", ShapeKind::ring},         {"star", ShapeKind::star},
      {"cross", ShapeKind::cross},       {"crescent", ShapeKind::crescent},
  };
  for (const auto& [n, k] : table) {
    if (name == n) {
      return k;
    }
  }
  throw ConfigError("unknown shape name '" + name + "'");
}

const char* shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::circle:
      return "circle";
    case ShapeKind::square:
      return "square";
    case ShapeKind::triangle:
      return "triangle";
    case ShapeKind::plus:
      return "plus";
    case ShapeKind::ring:
      return "ring";
    case ShapeKind::star:
      return "star";
    case ShapeKind::cross:
      return "cross";
    case ShapeKind::crescent:
      return "crescent";
  }
  return "?";
}

const char* split_name(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test_id:
      return "test_id";
    case Split::test_ood:
      return "test_ood";
  }
  return "?";
}

void DatasetSpec::validate() const {
  if (image_size < 32) {
    throw ConfigError("dataset: image_size must be >= 32");
  }
  if (num_classes < 1) {
    throw ConfigError("dataset: num_classes must be >= 1");
  }
  if (id_shapes.empty()) {
    throw ConfigError("dataset: id_shapes must not be empty");
  }
  if (id_shapes.size() < num_classes) {
    throw ConfigError("dataset: id_shapes must list at least num_classes shapes");
  }
  if (ood_shapes.empty() && test_ood_count > 0) {
    throw ConfigError("dataset: ood_shapes empty but test_ood count nonzero");
  }
  for (ShapeKind id : id_shapes) {
    for (ShapeKind ood : ood_shapes) {
      if (id == ood) {
        throw ConfigError(std::string("dataset: shape '") + shape_name(id) +
                          "' appears in both id_shapes and ood_shapes");
      }
    }
  }
  if (objects_min < 1 || objects_min > objects_max) {
    throw ConfigError("dataset: objects range must satisfy 1 <= min <= max");
  }
  if (!(size_min > 0.0 && size_min <= size_max && size_max <= 1.0)) {
    throw ConfigError("dataset: size range must satisfy 0 < min <= max <= 1");
  }
  if (!(distractor_prob >= 0.0 && distractor_prob <= 1.0)) {
    throw ConfigError("dataset: distractor_prob must lie in [0,1]");
  }
  if (train_count == 0 || val_count == 0) {
    throw ConfigError("dataset: train and val counts must be positive");
  }
}

std::vector<std::uint8_t> rasterize_bytes(std::span<const SceneObject> objects,
                                          std::size_t image_size,
                                          SplitMix64& rng) {
  if (image_size < 32) {
    throw ConfigError("rasterize: image_size must be >= 32");
  }
  const std::size_t s = image_size;
  std::vector<std::uint8_t> px(3 * s * s);
  // Background first: one gray level per pixel, row-major, all channels.
  for (std::size_t y = 0; y < s; ++y) {
    for (std::size_t x = 0; x < s; ++x) {
      const int level =
          kBackgroundLevel +
          static_cast<int>(rng.uniform_int(2 * kBackgroundNoise + 1)) -
          kBackgroundNoise;
      const auto v = static_cast<std::uint8_t>(level);
      px[0 * s * s + y * s + x] = v;
      px[1 * s * s + y * s + x] = v;
      px[2 * s * s + y * s + x] = v;
    }
  }
  const double sd = static_cast<double>(s);
  for (const SceneObject& obj : objects) {
    const double halfw = obj.w * 0.5;
    const double halfh = obj.h * 0.5;
    // Pixels whose centers fall inside the (clipped) box.
    const long x_lo = std::max(0L, static_cast<long>(std::ceil((obj.cx - halfw) * sd - 0.5)));
    const long x_hi = std::min(static_cast<long>(s) - 1,
                               static_cast<long>(std::floor((obj.cx + halfw) * sd - 0.5)));
    const long y_lo = std::max(0L, static_cast<long>(std::ceil((obj.cy - halfh) * sd - 0.5)));
    const long y_hi = std::min(static_cast<long>(s) - 1,
                               static_cast<long>(std::floor((obj.cy + halfh) * sd - 0.5)));
    for (long y = y_lo; y <= y_hi; ++y) {
      const double v = (((static_cast<double>(y) + 0.5) / sd) - obj.cy) / halfh;
      for (long x = x_lo; x <= x_hi; ++x) {
        const double u = (((static_cast<double>(x) + 0.5) / sd) - obj.cx) / halfw;
        if (shape_contains(obj.shape, u, v)) {
          const std::size_t idx =
              static_cast<std::size_t>(y) * s + static_cast<std::size_t>(x);
          px[0 * s * s + idx] = obj.color[0];
          px[1 * s * s + idx] = obj.color[1];
          px[2 * s * s + idx] = obj.color[2];
        }
      }
    }
  }
  return px;
}

diff::Tensor rasterize(std::span<const SceneObject> objects,
                       std::size_t image_size, SplitMix64& rng) {
  const std::vector<std::uint8_t> bytes =
      rasterize_bytes(objects, image_size, rng);
  std::vector<double> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    data[i] = static_cast<double>(bytes[i]) / 255.0;
  }
  return diff::Tensor::from_data({3, image_size, image_size},
                                 std::move(data));
}

diff::Tensor Scene::image_tensor() const {
  std::vector<double> data(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    data[i] = static_cast<double>(pixels[i]) / 255.0;
  }
  return diff::Tensor::from_data({3, image_size, image_size},
                                 std::move(data));
}

namespace {

SceneObject draw_object(const DatasetSpec& spec, SplitMix64& rng,
                        ShapeKind shape, int class_id) {
  SceneObject obj;
  obj.class_id = class_id;
  obj.shape = shape;
  obj.cx = rng.uniform(0.1, 0.9);
  obj.cy = rng.uniform(0.1, 0.9);
  obj.w = rng.uniform(spec.size_min, spec.size_max);
  obj.h = rng.uniform(spec.size_min, spec.size_max);
  obj.color = jitter_color(base_color(shape), rng);
  return obj;
}

}  // namespace

Scene generate_scene(const DatasetSpec& spec, Split split,
                     std::uint64_t global_index) {
  SplitMix64 rng(spec.seed ^ global_index);
  Scene scene;
  scene.image_size = spec.image_size;
  scene.is_ood = (split == Split::test_ood);

  const std::size_t n_objects =
      spec.objects_min +
      rng.uniform_int(spec.objects_max - spec.objects_min + 1);
  if (scene.is_ood) {
    for (std::size_t i = 0; i < n_objects; ++i) {
      const ShapeKind shape =
          spec.ood_shapes[rng.uniform_int(spec.ood_shapes.size())];
      scene.objects.push_back(draw_object(spec, rng, shape, -1));
    }
  } else {
    for (std::size_t i = 0; i < n_objects; ++i) {
      const int cls = static_cast<int>(rng.uniform_int(spec.num_classes));
      scene.objects.push_back(
          draw_object(spec, rng, spec.id_shapes[static_cast<std::size_t>(cls)], cls));
    }
    if (!spec.ood_shapes.empty() && rng.uniform() < spec.distractor_prob) {
      const ShapeKind shape =
          spec.ood_shapes[rng.uniform_int(spec.ood_shapes.size())];
      scene.objects.push_back(draw_object(spec, rng, shape, -1));
    }
  }
  scene.pixels = rasterize_bytes(scene.objects, spec.image_size, rng);
  return scene;
}

std::uint64_t split_index_base(const DatasetSpec& spec, Split split) {
  switch (split) {
    case Split::train:
      return 0;
    case Split::val:
      return spec.train_count;
    case Split::test_id:
      return spec.train_count + spec.val_count;
    case Split::test_ood:
      return spec.train_count + spec.val_count + spec.test_id_count;
  }
  return 0;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  auto fill = [&spec](std::vector<Scene>& out, Split split, std::size_t count) {
    const std::uint64_t base = split_index_base(spec, split);
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(generate_scene(spec, split, base + i));
    }
  };
  fill(ds.train, Split::train, spec.train_count);
  fill(ds.val, Split::val, spec.val_count);
  fill(ds.test_id, Split::test_id, spec.test_id_count);
  fill(ds.test_ood, Split::test_ood, spec.test_ood_count);
  return ds;
}

}  // namespace gridood::scenes
