#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "amodal/occlusion.hpp"
#include "amodal/scene.hpp"

namespace amodal {

enum class SpriteShape { kRectangle, kEllipse, kPolygon };
enum class BackgroundStyle { kFlat, kGradient };

// How depth ranks are assigned to sprites.
enum class DepthCue {
  kRandom,
  // Sprites whose lowest pixel is nearer the canvas bottom are in front.
  // Lowest rows are distinct within a scene.
  kLowerIsNearer,
};

// Flat, well-separated colours; every pair differs by at least 48 in some
// channel and none is close to the default backgrounds or the hole fill.
const std::vector<Rgb>& default_palette();

struct SynthConfig {
  int width = 256;
  int height = 256;
  int min_objects = 5;
  int max_objects = 8;
  std::vector<SpriteShape> shapes = {SpriteShape::kRectangle,
                                     SpriteShape::kEllipse,
                                     SpriteShape::kPolygon};
  int min_size = 24;
  int max_size = 96;
  std::vector<Rgb> palette = default_palette();
  BackgroundStyle background = BackgroundStyle::kFlat;
  DepthCue depth_cue = DepthCue::kRandom;
  int texture_noise = 0;  // uniform per-pixel jitter in [-noise, noise]
  long overlap_threshold = 1;
  std::uint64_t seed = 0;

  // Throws InvalidInput describing the first violated constraint.
  void validate() const;
};

// Deterministic for a fixed config. Instance ids are 0..N-1 in creation
// order, ranks are a random permutation (or follow depth_cue).
Scene generate_scene(const SynthConfig& cfg);

// Entry (i, j) = 1 when i is nearer than j and their amodal masks share at
// least `overlap_threshold` pixels. Ids are sorted ascending.
OcclusionMatrix ground_truth_matrix(const Scene& scene,
                                    long overlap_threshold = 1);

// Removal plan that repeatedly strips every unoccluded instance.
std::vector<std::vector<int>> peel_plan(const OcclusionMatrix& w);

// Image k composites the scene minus everything removed in steps < k, so the
// result has plan.size() + 1 images.
std::vector<Appearance> layered_images(
    const Scene& scene, const std::vector<std::vector<int>>& removal_plan);

// Two readings of "occlusion level", kept apart.
struct OcclusionStats {
  // Mean over instances of the hidden fraction of the amodal mask.
  double mean_occluded_fraction = 0.0;
  // Mean amodal IoU over overlapping instance pairs; absent without overlaps.
  std::optional<double> mean_pair_iou;
  int overlapping_pairs = 0;
};

OcclusionStats occlusion_stats(const Scene& scene, long overlap_threshold = 1);

}  // namespace amodal
