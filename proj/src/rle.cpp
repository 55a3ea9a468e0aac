#include "amodal/rle.hpp"

namespace amodal {

Rle encode_rle(const Mask& mask) {
  Rle rle{mask.height(), mask.width(), {}};
  bool current = false;
  long run = 0;
  for (int x = 0; x < mask.width(); ++x)
    for (int y = 0; y < mask.height(); ++y) {
      if (mask(x, y) != current) {
        rle.counts.push_back(run);
        run = 0;
        current = !current;
      }
      ++run;
    }
  rle.counts.push_back(run);
  return rle;
}

Mask decode_rle(const Rle& rle) {
  Mask mask(rle.width, rle.height);
  long total = 0;
  for (long c : rle.counts) {
    if (c < 0) throw ParseError("rle: negative run length");
    total += c;
  }
  if (total != static_cast<long>(rle.width) * rle.height)
    throw ParseError("rle: run lengths sum to " + std::to_string(total) +
                     ", expected " +
                     std::to_string(static_cast<long>(rle.width) * rle.height));
  long pos = 0;
  bool value = false;
  for (long c : rle.counts) {
    if (value)
      for (long k = pos; k < pos + c; ++k)
        mask.set(static_cast<int>(k / rle.height),
                 static_cast<int>(k % rle.height));
    pos += c;
    value = !value;
  }
  return mask;
}

nlohmann::json rle_to_json(const Mask& mask) {
  const Rle rle = encode_rle(mask);
  return {{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

Mask rle_from_json(const nlohmann::json& j) {
  try {
    Rle rle;
    const auto& size = j.at("size");
    if (!size.is_array() || size.size() != 2)
      throw ParseError("rle: size must be [height, width]");
    rle.height = size[0].get<int>();
    rle.width = size[1].get<int>();
    rle.counts = j.at("counts").get<std::vector<long>>();
    return decode_rle(rle);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rle: ") + e.what());
  }
}

}  // namespace amodal
