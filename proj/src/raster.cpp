#include "amodal/raster.hpp"

#include <algorithm>
#include <cstdint>

namespace amodal {

namespace {

std::string dims(int w, int h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

void require_positive(int width, int height) {
  if (width <= 0 || height <= 0)
    throw InvalidInput("raster dimensions must be positive, got " +
                       dims(width, height));
}

}  // namespace

Mask::Mask(int width, int height) {
  require_positive(width, height);
  bits_ = BitRaster::Constant(height, width, false);
}

Mask::Mask(BitRaster bits) : bits_(std::move(bits)) {
  require_positive(width(), height());
}

Appearance::Appearance(int width, int height, Rgb fill) {
  require_positive(width, height);
  planes_[0] = Channel::Constant(height, width, fill.r);
  planes_[1] = Channel::Constant(height, width, fill.g);
  planes_[2] = Channel::Constant(height, width, fill.b);
}

void require_same_dims(const Mask& a, const Mask& b, const char* where) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionMismatch(std::string(where) + ": mask " +
                            dims(a.width(), a.height()) + " vs mask " +
                            dims(b.width(), b.height()));
}

void require_same_dims(const Appearance& a, const Mask& b, const char* where) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionMismatch(std::string(where) + ": image " +
                            dims(a.width(), a.height()) + " vs mask " +
                            dims(b.width(), b.height()));
}

void require_same_dims(const Appearance& a, const Appearance& b,
                       const char* where) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionMismatch(std::string(where) + ": image " +
                            dims(a.width(), a.height()) + " vs image " +
                            dims(b.width(), b.height()));
}

namespace {

// Bytewise loops over the raw storage; these vectorize where Eigen's boolean
// reductions do not.
struct PairCounts {
  long both = 0;
  long either = 0;
};

const std::uint8_t* bytes(const Mask& m) {
  return reinterpret_cast<const std::uint8_t*>(m.bits().data());
}

// out[i] = op(a[i], b[i]) over the raw bytes.
template <typename Op>
Mask combine(const Mask& a, const Mask& b, Op op) {
  Mask out(a.width(), a.height());
  auto* po = reinterpret_cast<std::uint8_t*>(out.bits().data());
  const std::uint8_t *pa = bytes(a), *pb = bytes(b);
  const Eigen::Index n = a.bits().size();
  for (Eigen::Index i = 0; i < n; ++i) po[i] = op(pa[i], pb[i]);
  return out;
}

PairCounts count_pair(const Mask& a, const Mask& b) {
  const std::uint8_t *pa = bytes(a), *pb = bytes(b);
  const Eigen::Index n = a.bits().size();
  PairCounts c;
  for (Eigen::Index i = 0; i < n; ++i) {
    c.both += pa[i] & pb[i];
    c.either += pa[i] | pb[i];
  }
  return c;
}

}  // namespace

long overlap_area(const Mask& a, const Mask& b) {
  require_same_dims(a, b, "overlap_area");
  return count_pair(a, b).both;
}

double mask_iou(const Mask& a, const Mask& b) {
  require_same_dims(a, b, "mask_iou");
  const PairCounts c = count_pair(a, b);
  return c.either == 0 ? 0.0
                       : static_cast<double>(c.both) / static_cast<double>(c.either);
}

BBox bbox_from_mask(const Mask& m) {
  const int w = m.width(), h = m.height();
  std::vector<std::uint8_t> cols(w, 0);
  int y0 = h, y1 = -1;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = bytes(m) + std::ptrdiff_t(y) * w;
    std::uint8_t any = 0;
    for (int x = 0; x < w; ++x) {
      cols[x] |= row[x];
      any |= row[x];
    }
    if (any) {
      y0 = std::min(y0, y);
      y1 = y;
    }
  }
  if (y1 < 0) throw InvalidInput("bbox_from_mask: empty mask");
  int x0 = 0, x1 = w - 1;
  while (!cols[x0]) ++x0;
  while (!cols[x1]) --x1;
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Mask mask_union(const Mask& a, const Mask& b) {
  require_same_dims(a, b, "mask_union");
  return combine(a, b, [](std::uint8_t x, std::uint8_t y) { return std::uint8_t(x | y); });
}

Mask mask_intersection(const Mask& a, const Mask& b) {
  require_same_dims(a, b, "mask_intersection");
  return combine(a, b, [](std::uint8_t x, std::uint8_t y) { return std::uint8_t(x & y); });
}

Mask mask_minus(const Mask& a, const Mask& b) {
  require_same_dims(a, b, "mask_minus");
  return combine(a, b, [](std::uint8_t x, std::uint8_t y) { return std::uint8_t(x & (y ^ 1)); });
}

bool is_subset(const Mask& inner, const Mask& outer) {
  require_same_dims(inner, outer, "is_subset");
  const std::uint8_t *pi = bytes(inner), *po = bytes(outer);
  const Eigen::Index n = inner.bits().size();
  std::uint8_t stray = 0;
  for (Eigen::Index i = 0; i < n; ++i) stray |= pi[i] & (po[i] ^ 1);
  return !stray;
}

Mask translate(const Mask& m, int dx, int dy) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    const int ty = y + dy;
    if (ty < 0 || ty >= m.height()) continue;
    for (int x = 0; x < m.width(); ++x) {
      const int tx = x + dx;
      if (tx < 0 || tx >= m.width() || !m(x, y)) continue;
      out.set(tx, ty);
    }
  }
  return out;
}

Appearance translate(const Appearance& a, int dx, int dy) {
  Appearance out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    const int ty = y + dy;
    if (ty < 0 || ty >= a.height()) continue;
    for (int x = 0; x < a.width(); ++x) {
      const int tx = x + dx;
      if (tx < 0 || tx >= a.width()) continue;
      out.set(tx, ty, a.at(x, y));
    }
  }
  return out;
}

namespace {

// Separable min/max filter with a (2r+1)^2 square window. Pixels beyond the
// canvas count as unset for both operations. Each pass slides a running count
// of set pixels along the line.
void morph_line(const bool* in, bool* out, int n, std::ptrdiff_t stride,
                int radius, bool erode_op) {
  const int window = 2 * radius + 1;
  int count = 0;
  for (int k = 0; k < std::min(radius, n); ++k) count += in[k * stride];
  for (int i = 0; i < n; ++i) {
    const int enter = i + radius, leave = i - radius - 1;
    if (enter < n) count += in[enter * stride];
    if (leave >= 0) count -= in[leave * stride];
    out[i * stride] = erode_op ? count == window : count > 0;
  }
}

Mask morph(const Mask& m, int radius, bool erode_op) {
  if (radius <= 0) return m;
  const int w = m.width(), h = m.height();
  BitRaster pass(h, w);
  for (int y = 0; y < h; ++y)
    morph_line(m.bits().data() + std::ptrdiff_t(y) * w, pass.data() + std::ptrdiff_t(y) * w,
               w, 1, radius, erode_op);
  BitRaster out(h, w);
  for (int x = 0; x < w; ++x)
    morph_line(pass.data() + x, out.data() + x, h, w, radius, erode_op);
  return Mask(std::move(out));
}

}  // namespace

Mask erode(const Mask& m, int radius) { return morph(m, radius, true); }
Mask dilate(const Mask& m, int radius) { return morph(m, radius, false); }

void paint(Appearance& dst, const Appearance& src, const Mask& where) {
  require_same_dims(dst, src, "paint");
  require_same_dims(dst, where, "paint");
  const std::uint8_t* m = bytes(where);
  const Eigen::Index n = where.bits().size();
  for (int c = 0; c < 3; ++c) {
    std::uint8_t* d = dst.channel(c).data();
    const std::uint8_t* s = src.channel(c).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint8_t keep = m[i] - 1;  // 0xff outside the mask
      d[i] = (d[i] & keep) | (s[i] & ~keep);
    }
  }
}

void fill(Appearance& dst, const Mask& where, Rgb color) {
  require_same_dims(dst, where, "fill");
  const std::array<std::uint8_t, 3> v{color.r, color.g, color.b};
  const std::uint8_t* m = bytes(where);
  const Eigen::Index n = where.bits().size();
  for (int c = 0; c < 3; ++c) {
    std::uint8_t* d = dst.channel(c).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint8_t keep = m[i] - 1;
      d[i] = (d[i] & keep) | (v[c] & ~keep);
    }
  }
}

}  // namespace amodal
