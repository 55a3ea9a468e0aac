#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "amodal/raster.hpp"

namespace amodal {

// Image-completion quality on intensities normalised to [0, 1].
template <typename Scalar = double>
struct CompletionScores {
  Scalar rmse;
  Scalar ssim;
  Scalar psnr;  // dB
};

inline constexpr double kPsnrCapDb = 100.0;
inline constexpr double kPsnrRmseFloor = 1e-5;
inline constexpr int kSsimWindow = 8;

template <typename Scalar>
using Plane =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar = double>
Scalar rmse(const Appearance& pred, const Appearance& gt) {
  require_same_dims(pred, gt, "rmse");
  Scalar sum = 0;
  for (int c = 0; c < 3; ++c)
    sum += (pred.normalized<Scalar>(c) - gt.normalized<Scalar>(c))
               .square()
               .sum();
  const Scalar n = Scalar(3) * pred.width() * pred.height();
  return std::sqrt(sum / n);
}

// 20 log10(1 / rmse), capped for (near-)identical images.
template <typename Scalar = double>
Scalar psnr_from_rmse(Scalar err) {
  if (err < Scalar(kPsnrRmseFloor)) return Scalar(kPsnrCapDb);
  return std::min(Scalar(kPsnrCapDb), Scalar(20) * std::log10(Scalar(1) / err));
}

namespace detail {

// Summed-area table with a leading zero row and column.
template <typename Scalar>
Plane<Scalar> integral(const Plane<Scalar>& p) {
  Plane<Scalar> s = Plane<Scalar>::Zero(p.rows() + 1, p.cols() + 1);
  for (Eigen::Index y = 0; y < p.rows(); ++y)
    for (Eigen::Index x = 0; x < p.cols(); ++x)
      s(y + 1, x + 1) = p(y, x) + s(y, x + 1) + s(y + 1, x) - s(y, x);
  return s;
}

template <typename Scalar>
Scalar box(const Plane<Scalar>& s, Eigen::Index y, Eigen::Index x,
           Eigen::Index h, Eigen::Index w) {
  return s(y + h, x + w) - s(y, x + w) - s(y + h, x) + s(y, x);
}

}  // namespace detail

// Mean SSIM of one plane over all windows (stride 1). Windows are 8x8, or
// the whole plane along an axis shorter than 8.
template <typename Scalar = double>
Scalar ssim_plane(const Plane<Scalar>& a, const Plane<Scalar>& b) {
  const Scalar c1 = Scalar(0.01) * Scalar(0.01);
  const Scalar c2 = Scalar(0.03) * Scalar(0.03);
  const Eigen::Index wh = std::min<Eigen::Index>(kSsimWindow, a.rows());
  const Eigen::Index ww = std::min<Eigen::Index>(kSsimWindow, a.cols());
  const Scalar n = Scalar(wh * ww);

  const Plane<Scalar> sa = detail::integral<Scalar>(a);
  const Plane<Scalar> sb = detail::integral<Scalar>(b);
  const Plane<Scalar> saa = detail::integral<Scalar>(a * a);
  const Plane<Scalar> sbb = detail::integral<Scalar>(b * b);
  const Plane<Scalar> sab = detail::integral<Scalar>(a * b);

  Scalar total = 0;
  Eigen::Index windows = 0;
  for (Eigen::Index y = 0; y + wh <= a.rows(); ++y)
    for (Eigen::Index x = 0; x + ww <= a.cols(); ++x) {
      const Scalar mu_a = detail::box(sa, y, x, wh, ww) / n;
      const Scalar mu_b = detail::box(sb, y, x, wh, ww) / n;
      const Scalar var_a = detail::box(saa, y, x, wh, ww) / n - mu_a * mu_a;
      const Scalar var_b = detail::box(sbb, y, x, wh, ww) / n - mu_b * mu_b;
      const Scalar cov = detail::box(sab, y, x, wh, ww) / n - mu_a * mu_b;
      total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  return total / Scalar(windows);
}

// Per-channel SSIM, averaged over the three channels.
template <typename Scalar = double>
Scalar ssim(const Appearance& pred, const Appearance& gt) {
  require_same_dims(pred, gt, "ssim");
  Scalar sum = 0;
  for (int c = 0; c < 3; ++c)
    sum += ssim_plane<Scalar>(pred.normalized<Scalar>(c),
                              gt.normalized<Scalar>(c));
  return sum / Scalar(3);
}

template <typename Scalar = double>
CompletionScores<Scalar> completion_metrics(const Appearance& pred,
                                            const Appearance& gt) {
  const Scalar err = rmse<Scalar>(pred, gt);
  return {err, ssim<Scalar>(pred, gt), psnr_from_rmse<Scalar>(err)};
}

}  // namespace amodal
