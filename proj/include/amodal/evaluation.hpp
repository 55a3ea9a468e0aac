#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "amodal/occlusion.hpp"
#include "amodal/raster.hpp"

namespace amodal {

struct PredInstance {
  int id = 0;
  double score = 0.0;
  Mask mask;  // predicted amodal mask
};

struct GtInstance {
  int id = 0;
  Mask mask;  // ground-truth amodal mask
};

// Greedy matching: predictions in descending score order (ties by id) take
// the unmatched ground truth with the highest IoU, provided it is >= iou_t.
// Returns pred id -> gt id.
std::map<int, int> match_instances(std::span<const PredInstance> preds,
                                   std::span<const GtInstance> gts,
                                   double iou_t);

// Object size by amodal area: small < 32^2 <= medium < 96^2 <= large.
enum class SizeBucket { kAll, kSmall, kMedium, kLarge };
bool in_bucket(long area, SizeBucket bucket);

// IoU thresholds 0.50, 0.55, ..., 0.95.
const std::array<double, 10>& iou_thresholds();

// Per-image detection outcomes, pooled across images before ranking.
struct ImageHits {
  struct Hit {
    double score;
    bool true_positive;
  };
  std::vector<Hit> hits;
  long num_gt = 0;
};

// Predictions matched to a ground truth outside `bucket`, and unmatched
// predictions whose own area is outside it, are ignored.
ImageHits collect_hits(std::span<const PredInstance> preds,
                       std::span<const GtInstance> gts, double iou_t,
                       SizeBucket bucket);

// All-point interpolated area under the pooled precision/recall curve.
// Absent when there is no ground truth.
std::optional<double> average_precision(std::span<const ImageHits> images);
std::optional<double> average_precision(std::span<const PredInstance> preds,
                                        std::span<const GtInstance> gts,
                                        double iou_t,
                                        SizeBucket bucket = SizeBucket::kAll);

// One image worth of predictions and ground truth. Orders are indexed by the
// respective instance ids.
struct EvalImage {
  std::vector<PredInstance> preds;
  OcclusionMatrix pred_order;
  std::vector<GtInstance> gts;
  OcclusionMatrix gt_order;
};

struct APReport {
  std::optional<double> ap;  // mean over iou_thresholds()
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::optional<double> ap_s;
  std::optional<double> ap_m;
  std::optional<double> ap_l;
};

APReport evaluate_ap(std::span<const EvalImage> images);

// Ordered-pair tallies for the occlusion metric.
struct OapCounts {
  long correct = 0;
  long total = 0;            // matched pairs with a nonzero GT relation
  long false_relations = 0;  // matched pairs with GT 0 but predicted nonzero
  long unrelated = 0;        // matched pairs with GT 0

  OapCounts& operator+=(const OapCounts& o);
  std::optional<double> fraction() const;
};

// Pairs of matched predictions whose ground-truth relation is nonzero. A
// pair falls in `bucket` when the occluded (back) instance's GT amodal area
// does.
OapCounts oap_counts(const EvalImage& image, double iou_t,
                     SizeBucket bucket = SizeBucket::kAll);

// Fraction of occluded GT pairs whose predicted relation is correct; absent
// when no matched occluded pair exists.
std::optional<double> oap(const EvalImage& image, double iou_t);

struct OAPReport {
  struct Entry {
    std::optional<double> value;
    long pairs = 0;  // summed over thresholds for averaged entries
  };
  Entry oap;  // mean over iou_thresholds() of the defined values
  Entry oap50;
  Entry oap75;
  Entry oap85;
  Entry oap_s;
  Entry oap_m;
  Entry oap_l;
  // Predicted nonzero relations on pairs the ground truth leaves unrelated,
  // at IoU 0.5, over all matched unrelated pairs.
  std::optional<double> false_relation_rate;
};

OAPReport evaluate_oap(std::span<const EvalImage> images);

}  // namespace amodal
