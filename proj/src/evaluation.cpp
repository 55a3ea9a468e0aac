#include "amodal/evaluation.hpp"

#include <algorithm>
#include <numeric>

namespace amodal {

const std::array<double, 10>& iou_thresholds() {
  static const std::array<double, 10> t = {0.50, 0.55, 0.60, 0.65, 0.70,
                                           0.75, 0.80, 0.85, 0.90, 0.95};
  return t;
}

bool in_bucket(long area, SizeBucket bucket) {
  constexpr long kSmall = 32 * 32, kLarge = 96 * 96;
  switch (bucket) {
    case SizeBucket::kAll:
      return true;
    case SizeBucket::kSmall:
      return area < kSmall;
    case SizeBucket::kMedium:
      return area >= kSmall && area < kLarge;
    case SizeBucket::kLarge:
      return area >= kLarge;
  }
  return false;
}

namespace {

std::vector<std::size_t> by_score(std::span<const PredInstance> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (preds[a].score != preds[b].score) return preds[a].score > preds[b].score;
    return preds[a].id < preds[b].id;
  });
  return order;
}

Eigen::MatrixXd iou_matrix(std::span<const PredInstance> preds,
                           std::span<const GtInstance> gts) {
  Eigen::MatrixXd ious(preds.size(), gts.size());
  for (std::size_t p = 0; p < preds.size(); ++p)
    for (std::size_t g = 0; g < gts.size(); ++g)
      ious(p, g) = mask_iou(preds[p].mask, gts[g].mask);
  return ious;
}

// Index-level matching: pred index -> gt index, -1 when unmatched.
std::vector<int> greedy_match(std::span<const PredInstance> preds,
                              const Eigen::MatrixXd& ious, double iou_t) {
  std::vector<int> match(preds.size(), -1);
  std::vector<bool> used(ious.cols(), false);
  for (std::size_t p : by_score(preds)) {
    int best = -1;
    double best_iou = iou_t;
    for (Eigen::Index g = 0; g < ious.cols(); ++g) {
      if (used[g]) continue;
      const double iou = ious(p, g);
      if (iou >= best_iou && (best < 0 || iou > best_iou)) {
        best = static_cast<int>(g);
        best_iou = iou;
      }
    }
    if (best >= 0) {
      used[best] = true;
      match[p] = best;
    }
  }
  return match;
}

}  // namespace

std::map<int, int> match_instances(std::span<const PredInstance> preds,
                                   std::span<const GtInstance> gts,
                                   double iou_t) {
  const auto match = greedy_match(preds, iou_matrix(preds, gts), iou_t);
  std::map<int, int> out;
  for (std::size_t p = 0; p < preds.size(); ++p)
    if (match[p] >= 0) out[preds[p].id] = gts[match[p]].id;
  return out;
}

namespace {

ImageHits collect_hits(std::span<const PredInstance> preds,
                       std::span<const GtInstance> gts,
                       const Eigen::MatrixXd& ious, double iou_t,
                       SizeBucket bucket) {
  ImageHits out;
  for (const auto& g : gts)
    if (in_bucket(g.mask.area(), bucket)) ++out.num_gt;
  const auto match = greedy_match(preds, ious, iou_t);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (match[p] >= 0) {
      if (in_bucket(gts[match[p]].mask.area(), bucket))
        out.hits.push_back({preds[p].score, true});
    } else if (in_bucket(preds[p].mask.area(), bucket)) {
      out.hits.push_back({preds[p].score, false});
    }
  }
  return out;
}

}  // namespace

ImageHits collect_hits(std::span<const PredInstance> preds,
                       std::span<const GtInstance> gts, double iou_t,
                       SizeBucket bucket) {
  return collect_hits(preds, gts, iou_matrix(preds, gts), iou_t, bucket);
}

std::optional<double> average_precision(std::span<const ImageHits> images) {
  long num_gt = 0;
  std::vector<ImageHits::Hit> hits;
  for (const auto& img : images) {
    num_gt += img.num_gt;
    hits.insert(hits.end(), img.hits.begin(), img.hits.end());
  }
  if (num_gt == 0) return std::nullopt;
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });

  std::vector<double> precision, recall;
  long tp = 0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (hits[k].true_positive) ++tp;
    precision.push_back(double(tp) / double(k + 1));
    recall.push_back(double(tp) / double(num_gt));
  }
  // Precision envelope, then sum over recall increments.
  for (std::size_t k = precision.size(); k-- > 1;)
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

std::optional<double> average_precision(std::span<const PredInstance> preds,
                                        std::span<const GtInstance> gts,
                                        double iou_t, SizeBucket bucket) {
  const ImageHits hits = collect_hits(preds, gts, iou_t, bucket);
  return average_precision(std::span<const ImageHits>(&hits, 1));
}

namespace {

std::optional<double> mean_defined(std::span<const std::optional<double>> v) {
  double sum = 0.0;
  int n = 0;
  for (const auto& x : v)
    if (x) {
      sum += *x;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / n;
}

// IoU matrices of every image, computed once per report.
using IouCache = std::vector<Eigen::MatrixXd>;

IouCache cache_ious(std::span<const EvalImage> images) {
  IouCache cache;
  for (const auto& img : images) cache.push_back(iou_matrix(img.preds, img.gts));
  return cache;
}

std::optional<double> pooled_ap(std::span<const EvalImage> images,
                                const IouCache& ious, double iou_t,
                                SizeBucket bucket) {
  std::vector<ImageHits> hits;
  for (std::size_t i = 0; i < images.size(); ++i)
    hits.push_back(
        collect_hits(images[i].preds, images[i].gts, ious[i], iou_t, bucket));
  return average_precision(hits);
}

std::optional<double> averaged_ap(std::span<const EvalImage> images,
                                  const IouCache& ious, SizeBucket bucket) {
  std::vector<std::optional<double>> per_t;
  for (double t : iou_thresholds())
    per_t.push_back(pooled_ap(images, ious, t, bucket));
  return mean_defined(per_t);
}

}  // namespace

APReport evaluate_ap(std::span<const EvalImage> images) {
  const IouCache ious = cache_ious(images);
  APReport r;
  r.ap = averaged_ap(images, ious, SizeBucket::kAll);
  r.ap50 = pooled_ap(images, ious, 0.50, SizeBucket::kAll);
  r.ap75 = pooled_ap(images, ious, 0.75, SizeBucket::kAll);
  r.ap_s = averaged_ap(images, ious, SizeBucket::kSmall);
  r.ap_m = averaged_ap(images, ious, SizeBucket::kMedium);
  r.ap_l = averaged_ap(images, ious, SizeBucket::kLarge);
  return r;
}

OapCounts& OapCounts::operator+=(const OapCounts& o) {
  correct += o.correct;
  total += o.total;
  false_relations += o.false_relations;
  unrelated += o.unrelated;
  return *this;
}

std::optional<double> OapCounts::fraction() const {
  if (total == 0) return std::nullopt;
  return double(correct) / double(total);
}

namespace {

OapCounts oap_counts(const EvalImage& image, const Eigen::MatrixXd& ious,
                     double iou_t, SizeBucket bucket) {
  const auto index_match = greedy_match(image.preds, ious, iou_t);
  std::map<int, int> match;
  for (std::size_t p = 0; p < image.preds.size(); ++p)
    if (index_match[p] >= 0)
      match[image.preds[p].id] = image.gts[index_match[p]].id;
  std::map<int, long> gt_area;
  for (const auto& g : image.gts) gt_area[g.id] = g.mask.area();

  std::vector<std::pair<int, int>> pairs(match.begin(), match.end());
  OapCounts counts;
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const auto [p, g] = pairs[a];
      const auto [q, h] = pairs[b];
      const int truth = image.gt_order.at(g, h);
      const int guess = image.pred_order.at(p, q);
      if (truth == 0) {
        if (bucket != SizeBucket::kAll) continue;
        ++counts.unrelated;
        if (guess != 0) ++counts.false_relations;
        continue;
      }
      const int back = truth == 1 ? h : g;
      if (!in_bucket(gt_area.at(back), bucket)) continue;
      ++counts.total;
      if (guess == truth) ++counts.correct;
    }
  return counts;
}

}  // namespace

OapCounts oap_counts(const EvalImage& image, double iou_t, SizeBucket bucket) {
  return oap_counts(image, iou_matrix(image.preds, image.gts), iou_t, bucket);
}

std::optional<double> oap(const EvalImage& image, double iou_t) {
  return oap_counts(image, iou_t).fraction();
}

namespace {

OAPReport::Entry pooled_oap(std::span<const EvalImage> images,
                            const IouCache& ious, double iou_t,
                            SizeBucket bucket) {
  OapCounts sum;
  for (std::size_t i = 0; i < images.size(); ++i)
    sum += oap_counts(images[i], ious[i], iou_t, bucket);
  return {sum.fraction(), sum.total};
}

OAPReport::Entry averaged_oap(std::span<const EvalImage> images,
                              const IouCache& ious, SizeBucket bucket) {
  std::vector<std::optional<double>> per_t;
  long pairs = 0;
  for (double t : iou_thresholds()) {
    const auto e = pooled_oap(images, ious, t, bucket);
    per_t.push_back(e.value);
    pairs += e.pairs;
  }
  return {mean_defined(per_t), pairs};
}

}  // namespace

OAPReport evaluate_oap(std::span<const EvalImage> images) {
  const IouCache ious = cache_ious(images);
  OAPReport r;
  r.oap = averaged_oap(images, ious, SizeBucket::kAll);
  r.oap50 = pooled_oap(images, ious, 0.50, SizeBucket::kAll);
  r.oap75 = pooled_oap(images, ious, 0.75, SizeBucket::kAll);
  r.oap85 = pooled_oap(images, ious, 0.85, SizeBucket::kAll);
  r.oap_s = averaged_oap(images, ious, SizeBucket::kSmall);
  r.oap_m = averaged_oap(images, ious, SizeBucket::kMedium);
  r.oap_l = averaged_oap(images, ious, SizeBucket::kLarge);
  OapCounts at50;
  for (std::size_t i = 0; i < images.size(); ++i)
    at50 += oap_counts(images[i], ious[i], 0.50, SizeBucket::kAll);
  if (at50.unrelated > 0)
    r.false_relation_rate = double(at50.false_relations) / double(at50.unrelated);
  return r;
}

}  // namespace amodal
