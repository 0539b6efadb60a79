#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diffcore/tensor.hpp"
#include "synthscenes/rng.hpp"

namespace gridood::scenes {

enum class ShapeKind : int {
  circle = 0,
  square,
  triangle,
  plus,
  ring,
  star,
  cross,
  crescent,
};

ShapeKind shape_from_name(const std::string& name);
const char* shape_name(ShapeKind kind);

// Filled-shape membership in box-local coordinates u,v in [-1,1]^2.
bool shape_contains(ShapeKind kind, double u, double v);

struct SceneObject {
  int class_id = -1;  // [0,N_c) for annotated objects, -1 for distractors
  double cx = 0.5, cy = 0.5;  // center, normalized to [0,1]^2
  double w = 0.2, h = 0.2;    // size, normalized, in (0,1]
  std::array<std::uint8_t, 3> color{0, 0, 0};
  ShapeKind shape = ShapeKind::circle;
};

// Background gray level and the +-range of the per-pixel noise, in 8-bit
// quantization steps.
inline constexpr int kBackgroundLevel = 128;
inline constexpr int kBackgroundNoise = 6;

struct Scene {
  std::size_t image_size = 0;
  std::vector<std::uint8_t> pixels;  // planar [3][S][S], 8-bit
  std::vector<SceneObject> objects;
  bool is_ood = false;

  // [3,S,S] tensor with values in [0,1] (pixel/255).
  diff::Tensor image_tensor() const;
};

struct DatasetSpec {
  std::uint64_t seed = 42;
  std::size_t image_size = 160;
  std::size_t num_classes = 4;
  std::size_t train_count = 2000;
  std::size_t val_count = 200;
  std::size_t test_id_count = 500;
  std::size_t test_ood_count = 500;
  std::size_t objects_min = 1;
  std::size_t objects_max = 4;
  double size_min = 0.15;
  double size_max = 0.45;
  double distractor_prob = 0.3;
  std::vector<ShapeKind> id_shapes{ShapeKind::circle, ShapeKind::square,
                                   ShapeKind::triangle, ShapeKind::plus};
  std::vector<ShapeKind> ood_shapes{ShapeKind::ring, ShapeKind::star,
                                    ShapeKind::cross, ShapeKind::crescent};

  void validate() const;  // throws ConfigError
};

struct Dataset {
  std::vector<Scene> train, val, test_id, test_ood;
};

enum class Split { train, val, test_id, test_ood };
const char* split_name(Split s);

// Draws shapes filled, back to front, into a fresh background of low
// amplitude gray noise. The rng stream continues across the call, so a
// scene is reproducible from its per-scene seed alone.
std::vector<std::uint8_t> rasterize_bytes(std::span<const SceneObject> objects,
                                          std::size_t image_size,
                                          SplitMix64& rng);
diff::Tensor rasterize(std::span<const SceneObject> objects,
                       std::size_t image_size, SplitMix64& rng);

// One scene, fully determined by (spec.seed, global_index). Global indices
// are unique across splits, so no two scenes share an rng stream.
Scene generate_scene(const DatasetSpec& spec, Split split,
                     std::uint64_t global_index);

Dataset generate_dataset(const DatasetSpec& spec);

// First global index of each split under `spec`.
std::uint64_t split_index_base(const DatasetSpec& spec, Split split);

}  // namespace gridood::scenes
