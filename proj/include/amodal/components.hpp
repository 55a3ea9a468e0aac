#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "amodal/engine.hpp"

namespace amodal {

// Emits the ground-truth visible mask of every instance still present, with
// a non-occlusion score of 1 for unoccluded instances and 0 otherwise.
class OracleSegmenter : public Segmenter {
 public:
  explicit OracleSegmenter(Scene scene, long overlap_threshold = 1);

  std::vector<Detection> segment(const Appearance& image) override;
  void on_selected(std::span<const Detection> selected) override;

  const std::set<int>& removed() const { return removed_; }

 private:
  Scene scene_;
  OcclusionMatrix order_;
  std::set<int> removed_;
};

struct CorruptionConfig {
  int mask_erode_px = 0;
  int mask_dilate_px = 0;
  double label_flip_prob = 0.0;
  double drop_prob = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Degrades another segmenter's output. Random decisions depend only on
// (seed, step, instance), so results do not depend on call interleaving
// across decompositions.
class CorruptedSegmenter : public Segmenter {
 public:
  CorruptedSegmenter(std::unique_ptr<Segmenter> inner, CorruptionConfig cfg);

  std::vector<Detection> segment(const Appearance& image) override;
  void on_selected(std::span<const Detection> selected) override;

 private:
  std::unique_ptr<Segmenter> inner_;
  CorruptionConfig cfg_;
  int step_ = 0;
};

struct HeuristicOptions {
  // Neighbouring pixels join a component when every channel differs by at
  // most this much.
  int tolerance = 12;
  long min_area = 16;
};

// Colour-region segmentation for flat-coloured scenes. The largest component
// touching the canvas border is treated as background. A component's
// non-occlusion score is 1 minus the fraction of its boundary pixels that
// touch another (non-background) component.
class HeuristicSegmenter : public Segmenter {
 public:
  explicit HeuristicSegmenter(HeuristicOptions opts = {});
  std::vector<Detection> segment(const Appearance& image) override;

 private:
  HeuristicOptions opts_;
};

// Repairs holes from the ground-truth composite of the instances that are
// still present.
class OracleCompleter : public Completer {
 public:
  explicit OracleCompleter(Scene scene);

  Appearance complete(const Appearance& image, const Mask& hole) override;
  void on_selected(std::span<const Detection> selected) override;

 private:
  Scene scene_;
  std::set<int> removed_;
};

// Harmonic fill: Gauss-Seidel relaxation of the discrete Laplace equation
// inside the hole, with the surrounding pixels as Dirichlet boundary.
class InpaintCompleter : public Completer {
 public:
  explicit InpaintCompleter(int max_iterations = 4000, double tolerance = 0.01);
  Appearance complete(const Appearance& image, const Mask& hole) override;

 private:
  int max_iterations_;
  double tolerance_;  // in 8-bit intensity units
};

const std::vector<std::string>& segmenter_names();
const std::vector<std::string>& completer_names();

}  // namespace amodal
