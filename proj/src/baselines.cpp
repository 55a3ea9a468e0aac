#include "amodal/baselines.hpp"

#include <algorithm>
#include <functional>

namespace amodal {

namespace {

// Orders overlapping pairs by a per-instance key: the larger key is in front.
OcclusionMatrix order_by_key(std::span<const OrderingInput> instances,
                             const std::function<double(const OrderingInput&)>& key,
                             long overlap_threshold) {
  std::vector<const OrderingInput*> sorted;
  for (const auto& inst : instances) sorted.push_back(&inst);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->id < b->id; });
  std::vector<int> ids;
  std::vector<double> keys;
  for (auto* inst : sorted) {
    ids.push_back(inst->id);
    keys.push_back(key(*inst));
  }
  OcclusionMatrix w = OcclusionMatrix::zeros(ids);
  for (std::size_t a = 0; a < sorted.size(); ++a)
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      if (overlap_area(sorted[a]->amodal, sorted[b]->amodal) < overlap_threshold)
        continue;
      if (keys[a] == keys[b]) continue;
      w.set_pair(int(a), int(b), keys[a] > keys[b] ? 1 : -1);
    }
  return w;
}

int lowest_row(const Mask& m) {
  for (int y = m.height() - 1; y >= 0; --y)
    if (m.bits().row(y).any()) return y;
  throw InvalidInput("ordering: empty amodal mask");
}

}  // namespace

OcclusionMatrix order_by_area(std::span<const OrderingInput> instances,
                              AreaConvention convention,
                              long overlap_threshold) {
  const double sign = convention == AreaConvention::kLargerFront ? 1.0 : -1.0;
  return order_by_key(
      instances,
      [sign](const OrderingInput& i) { return sign * double(i.amodal.area()); },
      overlap_threshold);
}

OcclusionMatrix order_by_yaxis(std::span<const OrderingInput> instances,
                               long overlap_threshold) {
  return order_by_key(
      instances,
      [](const OrderingInput& i) { return double(lowest_row(i.amodal)); },
      overlap_threshold);
}

OcclusionMatrix order_by_iou_area(std::span<const OrderingInput> instances,
                                  long overlap_threshold) {
  return order_by_key(
      instances,
      [](const OrderingInput& i) { return mask_iou(i.visible, i.amodal); },
      overlap_threshold);
}

OcclusionMatrix order_by_layer(std::span<const OrderingInput> instances,
                               const LayerOrderAssignment& layers,
                               long overlap_threshold) {
  return order_by_key(
      instances,
      [&layers](const OrderingInput& i) {
        auto it = layers.find(i.id);
        if (it == layers.end())
          throw NotFound("ordering: no layer order for id " +
                         std::to_string(i.id));
        return -double(it->second);
      },
      overlap_threshold);
}

}  // namespace amodal
