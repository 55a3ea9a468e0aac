#include "amodal/experiment.hpp"

namespace amodal {

EvalImage eval_image(const Scene& gt, const OcclusionMatrix& gt_order,
                     const Decomposition& pred) {
  EvalImage img;
  for (const auto& step : pred.trace.steps)
    for (const auto& sel : step.selected)
      img.preds.push_back({sel.id, sel.detection.class_score, sel.detection.mask});
  img.pred_order = pred.order;
  for (const auto& inst : gt.instances()) img.gts.push_back({inst.id, inst.amodal_mask});
  img.gt_order = gt_order;
  return img;
}

EvalImage eval_image(const Scene& gt, const OcclusionMatrix& gt_order) {
  EvalImage img;
  for (const auto& inst : gt.instances()) {
    img.preds.push_back({inst.id, 1.0, inst.amodal_mask});
    img.gts.push_back({inst.id, inst.amodal_mask});
  }
  img.pred_order = gt_order;
  img.gt_order = gt_order;
  return img;
}

std::vector<OrderingInput> ordering_inputs(const DecompositionTrace& trace) {
  std::vector<OrderingInput> out;
  Mask removed;
  for (const auto& step : trace.steps)
    for (const auto& sel : step.selected) {
      const Mask& m = sel.detection.mask;
      if (removed.empty_raster()) removed = Mask(m.width(), m.height());
      out.push_back({sel.id, m, mask_minus(m, removed)});
      removed = mask_union(removed, m);
    }
  return out;
}

std::vector<OrderingInput> ordering_inputs(const Scene& scene) {
  std::vector<OrderingInput> out;
  for (const auto& inst : scene.instances())
    out.push_back({inst.id, inst.amodal_mask, inst.visible_mask});
  return out;
}

const std::array<std::string, 4>& baseline_names() {
  static const std::array<std::string, 4> names = {"Area", "Y-axis", "IoU Area",
                                                   "layer order"};
  return names;
}

std::array<EvalImage, 4> baseline_images(const EvalImage& image,
                                         std::span<const OrderingInput> inputs,
                                         const LayerOrderAssignment& layers,
                                         long overlap_threshold) {
  std::array<EvalImage, 4> out = {image, image, image, image};
  out[0].pred_order =
      order_by_area(inputs, AreaConvention::kLargerBehind, overlap_threshold);
  out[1].pred_order = order_by_yaxis(inputs, overlap_threshold);
  out[2].pred_order = order_by_iou_area(inputs, overlap_threshold);
  out[3].pred_order = order_by_layer(inputs, layers, overlap_threshold);
  return out;
}

void CompletionTally::add(const CompletionScores<double>& s) {
  rmse += s.rmse;
  ssim += s.ssim;
  psnr += s.psnr;
  ++count;
}

CompletionTally& CompletionTally::operator+=(const CompletionTally& o) {
  rmse += o.rmse;
  ssim += o.ssim;
  psnr += o.psnr;
  count += o.count;
  return *this;
}

std::optional<CompletionScores<double>> CompletionTally::mean() const {
  if (count == 0) return std::nullopt;
  return CompletionScores<double>{rmse / count, ssim / count, psnr / count};
}

namespace {

Appearance object_crop(const InstanceRecord& inst, const BBox& b) {
  Appearance canvas(inst.appearance.width(), inst.appearance.height());
  paint(canvas, inst.appearance, inst.amodal_mask);
  Appearance out(b.w, b.h);
  for (int c = 0; c < 3; ++c)
    out.channel(c) = canvas.channel(c).block(b.y, b.x, b.h, b.w);
  return out;
}

}  // namespace

CompletionReport completion_report(const Scene& gt, const Scene& pred,
                                   double iou_t) {
  CompletionReport r;
  r.background.add(completion_metrics<double>(pred.background(), gt.background()));

  std::vector<PredInstance> preds;
  for (const auto& inst : pred.instances()) preds.push_back({inst.id, 1.0, inst.amodal_mask});
  std::vector<GtInstance> gts;
  for (const auto& inst : gt.instances()) gts.push_back({inst.id, inst.amodal_mask});
  for (const auto& [p, g] : match_instances(preds, gts, iou_t)) {
    const InstanceRecord& gi = gt.instance(g);
    const BBox b = bbox_from_mask(gi.amodal_mask);
    r.objects.add(completion_metrics<double>(object_crop(pred.instance(p), b),
                                             object_crop(gi, b)));
  }
  return r;
}

}  // namespace amodal
