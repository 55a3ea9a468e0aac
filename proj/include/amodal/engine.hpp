#pragma once

#include <span>
#include <vector>

#include "amodal/occlusion.hpp"
#include "amodal/scene.hpp"

namespace amodal {

// Produces candidate instances for the current (partially decomposed) image.
// Implementations may keep per-decomposition state; use one instance per
// concurrent decomposition.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::vector<Detection> segment(const Appearance& image) = 0;
  // Told which detections the engine removed at the current step.
  virtual void on_selected(std::span<const Detection> /*selected*/) {}
};

// Fills holes left by removed instances. Must leave every pixel outside
// `hole` bit-identical; the engine checks this after every call.
class Completer {
 public:
  virtual ~Completer() = default;
  virtual Appearance complete(const Appearance& image, const Mask& hole) = 0;
  virtual void on_selected(std::span<const Detection> /*selected*/) {}
};

struct EngineConfig {
  double class_score_threshold = 0.5;
  double nonocc_threshold = 0.5;
  int max_steps = 10;
  int max_detections = 100;
  long overlap_threshold = 1;
  // Detections overlapping a higher-scored one above this IoU are dropped.
  double dedup_iou = 0.9;

  void validate() const;
};

// Sentinel written into carved holes before completion.
inline constexpr Rgb kHoleFill{128, 128, 128};

// Detections passing both thresholds, or the single best non-occlusion
// candidate when none do. The result is ordered by removal priority.
// Throws InvalidInput on an empty list.
std::vector<Detection> select_fully_visible(std::span<const Detection> dets,
                                            const EngineConfig& cfg);

struct CarvedImage {
  Appearance image;
  Mask hole;
};

CarvedImage carve_holes(const Appearance& image,
                        std::span<const Mask> selected_masks);

struct Decomposition {
  DecompositionTrace trace;
  OcclusionMatrix order;
};

// Layer-by-layer decomposition: segment, select the unoccluded layer, carve
// it out, complete the hole and repeat until nothing is detected or
// max_steps is reached. Instance ids are assigned 0, 1, ... in removal
// order. Throws ContractViolation when a component misbehaves.
Decomposition decompose(const Appearance& image, Segmenter& segmenter,
                        Completer& completer, const EngineConfig& cfg);

// Removal keys of every instance in a trace: (step, position within step).
std::map<int, RemovalKey> removal_keys(const DecompositionTrace& trace);
std::map<int, Mask> trace_masks(const DecompositionTrace& trace);

// Rebuilds an editable scene from a decomposition: each removed instance
// takes its pixels from the image it was removed from, ranks follow removal
// order and the last completed image becomes the background.
Scene scene_from_trace(const Appearance& input, const DecompositionTrace& trace);

}  // namespace amodal
