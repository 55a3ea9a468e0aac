#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amodal/baselines.hpp"
#include "amodal/engine.hpp"
#include "amodal/evaluation.hpp"
#include "amodal/metrics.hpp"

namespace amodal {

// Predicted instances of a decomposition: each removed detection, scored by
// its class score, with the trace's pairwise order.
EvalImage eval_image(const Scene& gt, const OcclusionMatrix& gt_order,
                     const Decomposition& pred);
// Ground truth scored against itself.
EvalImage eval_image(const Scene& gt, const OcclusionMatrix& gt_order);

// Inputs for the ordering rules. The visible part of a predicted instance is
// its mask minus everything removed before it.
std::vector<OrderingInput> ordering_inputs(const DecompositionTrace& trace);
std::vector<OrderingInput> ordering_inputs(const Scene& scene);

// Table rows in display order.
const std::array<std::string, 4>& baseline_names();

// `image` with its predicted order replaced by each rule in baseline_names()
// order. Area uses the larger-behind convention; the layer rule reads
// `layers`.
std::array<EvalImage, 4> baseline_images(const EvalImage& image,
                                         std::span<const OrderingInput> inputs,
                                         const LayerOrderAssignment& layers,
                                         long overlap_threshold = 1);

// Running means of completion scores.
struct CompletionTally {
  double rmse = 0.0;
  double ssim = 0.0;
  double psnr = 0.0;
  long count = 0;

  void add(const CompletionScores<double>& s);
  CompletionTally& operator+=(const CompletionTally& o);
  std::optional<CompletionScores<double>> mean() const;
};

struct CompletionReport {
  CompletionTally objects;     // matched instances at IoU 0.5
  CompletionTally background;  // final completed image vs the empty room
};

// Objects are compared inside the GT amodal bounding box, each painted over
// black within its own amodal mask. `pred` is the editable scene rebuilt from
// the decomposition.
CompletionReport completion_report(const Scene& gt, const Scene& pred,
                                   double iou_t = 0.5);

}  // namespace amodal
