#pragma once

#include <json.hpp>

#include <vector>

#include "amodal/raster.hpp"

namespace amodal {

// Uncompressed COCO run-length encoding: column-major scan, alternating runs
// starting with unset pixels (the first count may be 0).
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<long> counts;

  friend bool operator==(const Rle&, const Rle&) = default;
};

Rle encode_rle(const Mask& mask);
Mask decode_rle(const Rle& rle);

// {"size": [h, w], "counts": [...]}
nlohmann::json rle_to_json(const Mask& mask);
Mask rle_from_json(const nlohmann::json& j);

}  // namespace amodal
