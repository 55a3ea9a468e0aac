#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>

#include "amodal/error.hpp"

namespace amodal {

// Rasters are stored row-major with rows = height and cols = width, so
// element (y, x) addresses pixel column x of row y. Origin is top-left and
// y grows downward.
using BitRaster =
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Channel =
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  friend bool operator==(const BBox&, const BBox&) = default;
};

class Mask {
 public:
  Mask() = default;
  Mask(int width, int height);
  explicit Mask(BitRaster bits);

  int width() const { return static_cast<int>(bits_.cols()); }
  int height() const { return static_cast<int>(bits_.rows()); }
  bool empty_raster() const { return bits_.size() == 0; }

  bool operator()(int x, int y) const { return bits_(y, x); }
  void set(int x, int y, bool value = true) { bits_(y, x) = value; }

  const BitRaster& bits() const { return bits_; }
  BitRaster& bits() { return bits_; }

  long area() const { return bits_.count(); }
  bool none() const { return !bits_.any(); }

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.width() == b.width() && a.height() == b.height() &&
           (a.bits_ == b.bits_).all();
  }

 private:
  BitRaster bits_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Three 8-bit planes. Metrics reinterpret each channel in [0, 1].
class Appearance {
 public:
  Appearance() = default;
  Appearance(int width, int height, Rgb fill = {});

  int width() const { return static_cast<int>(planes_[0].cols()); }
  int height() const { return static_cast<int>(planes_[0].rows()); }

  Rgb at(int x, int y) const {
    return {planes_[0](y, x), planes_[1](y, x), planes_[2](y, x)};
  }
  void set(int x, int y, Rgb c) {
    planes_[0](y, x) = c.r;
    planes_[1](y, x) = c.g;
    planes_[2](y, x) = c.b;
  }

  const Channel& channel(int c) const { return planes_[c]; }
  Channel& channel(int c) { return planes_[c]; }

  // Channel c as a floating raster with values in [0, 1].
  template <typename Scalar>
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
  normalized(int c) const {
    return planes_[c].template cast<Scalar>() / Scalar(255);
  }

  friend bool operator==(const Appearance& a, const Appearance& b) {
    if (a.width() != b.width() || a.height() != b.height()) return false;
    for (int c = 0; c < 3; ++c)
      if (!(a.planes_[c] == b.planes_[c]).all()) return false;
    return true;
  }

 private:
  std::array<Channel, 3> planes_;
};

void require_same_dims(const Mask& a, const Mask& b, const char* where);
void require_same_dims(const Appearance& a, const Mask& b, const char* where);
void require_same_dims(const Appearance& a, const Appearance& b,
                       const char* where);

// |a ∩ b|
long overlap_area(const Mask& a, const Mask& b);
// |a ∩ b| / |a ∪ b|, 0 when the union is empty.
double mask_iou(const Mask& a, const Mask& b);
BBox bbox_from_mask(const Mask& m);

Mask mask_union(const Mask& a, const Mask& b);
Mask mask_intersection(const Mask& a, const Mask& b);
Mask mask_minus(const Mask& a, const Mask& b);
bool is_subset(const Mask& inner, const Mask& outer);

// Shift by (dx, dy); bits that leave the canvas are dropped.
Mask translate(const Mask& m, int dx, int dy);
Appearance translate(const Appearance& a, int dx, int dy);

// Square (8-neighbourhood) structuring element of radius `radius`.
Mask erode(const Mask& m, int radius);
Mask dilate(const Mask& m, int radius);

// Copies `src` into `dst` wherever `where` is set.
void paint(Appearance& dst, const Appearance& src, const Mask& where);
void fill(Appearance& dst, const Mask& where, Rgb color);

}  // namespace amodal
