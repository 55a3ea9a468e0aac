#pragma once

#include <span>

#include "amodal/occlusion.hpp"
#include "amodal/raster.hpp"

namespace amodal {

// Masks available to the heuristic depth-ordering rules. Every rule only
// orders pairs whose amodal masks overlap by >= overlap_threshold pixels,
// and returns 0 on ties. Output ids are sorted ascending.
struct OrderingInput {
  int id = 0;
  Mask amodal;
  Mask visible;
};

enum class AreaConvention { kLargerFront, kLargerBehind };

OcclusionMatrix order_by_area(std::span<const OrderingInput> instances,
                              AreaConvention convention,
                              long overlap_threshold = 1);

// The instance whose lowest pixel sits nearer the image bottom is in front.
OcclusionMatrix order_by_yaxis(std::span<const OrderingInput> instances,
                               long overlap_threshold = 1);

// The instance with the larger IoU(visible, amodal), i.e. the less occluded
// one, is in front.
OcclusionMatrix order_by_iou_area(std::span<const OrderingInput> instances,
                                  long overlap_threshold = 1);

// Lower absolute layer order is in front.
OcclusionMatrix order_by_layer(std::span<const OrderingInput> instances,
                               const LayerOrderAssignment& layers,
                               long overlap_threshold = 1);

}  // namespace amodal
