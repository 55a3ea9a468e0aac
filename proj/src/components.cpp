#include "amodal/components.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

#include "amodal/synth.hpp"

namespace amodal {

const std::vector<std::string>& segmenter_names() {
  static const std::vector<std::string> names = {"oracle", "corrupted",
                                                 "heuristic"};
  return names;
}

const std::vector<std::string>& completer_names() {
  static const std::vector<std::string> names = {"oracle", "inpaint"};
  return names;
}

// --- oracle segmenter ------------------------------------------------------

OracleSegmenter::OracleSegmenter(Scene scene, long overlap_threshold)
    : scene_(std::move(scene)),
      order_(ground_truth_matrix(scene_, overlap_threshold)) {}

std::vector<Detection> OracleSegmenter::segment(const Appearance& image) {
  require_same_dims(image, Appearance(scene_.width(), scene_.height()),
                    "oracle segmenter");
  const auto labels = binary_labels(peel(order_, removed_));
  std::vector<Detection> out;
  Mask covered(scene_.width(), scene_.height());
  for (const auto& inst : scene_.instances()) {  // front to back
    if (removed_.count(inst.id)) continue;
    Mask visible = mask_minus(inst.amodal_mask, covered);
    covered = mask_union(covered, inst.amodal_mask);
    if (visible.none()) continue;
    Detection d;
    d.bbox = bbox_from_mask(visible);
    d.category = inst.category;
    d.class_score = 1.0;
    d.mask = std::move(visible);
    d.nonocc_score = labels.at(inst.id) == 0 ? 1.0 : 0.0;
    d.source_id = inst.id;
    out.push_back(std::move(d));
  }
  return out;
}

void OracleSegmenter::on_selected(std::span<const Detection> selected) {
  for (const auto& d : selected) {
    if (!d.source_id)
      throw InvalidInput("oracle segmenter: selection without a source id");
    if (!scene_.contains(*d.source_id))
      throw NotFound("oracle segmenter: unknown instance id " +
                     std::to_string(*d.source_id));
    if (!removed_.insert(*d.source_id).second)
      throw InvalidInput("oracle segmenter: instance " +
                         std::to_string(*d.source_id) + " removed twice");
  }
}

// --- corruption ------------------------------------------------------------

void CorruptionConfig::validate() const {
  if (mask_erode_px < 0 || mask_dilate_px < 0)
    throw InvalidInput("corruption: morphology radii must be >= 0");
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(label_flip_prob) || !unit(drop_prob))
    throw InvalidInput("corruption: probabilities must lie in [0, 1]");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from (seed, step, instance, salt).
double unit_draw(std::uint64_t seed, int step, int instance, int salt) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(step));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(instance)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(salt));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

CorruptedSegmenter::CorruptedSegmenter(std::unique_ptr<Segmenter> inner,
                                       CorruptionConfig cfg)
    : inner_(std::move(inner)), cfg_(cfg) {
  cfg_.validate();
  if (!inner_) throw InvalidInput("corruption: no segmenter to wrap");
}

std::vector<Detection> CorruptedSegmenter::segment(const Appearance& image) {
  std::vector<Detection> dets = inner_->segment(image);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    Detection d = std::move(dets[i]);
    const int key = d.source_id.value_or(static_cast<int>(i));
    if (cfg_.drop_prob > 0.0 && unit_draw(cfg_.seed, step_, key, 1) < cfg_.drop_prob)
      continue;
    if (cfg_.label_flip_prob > 0.0 &&
        unit_draw(cfg_.seed, step_, key, 2) < cfg_.label_flip_prob)
      d.nonocc_score = 1.0 - d.nonocc_score;
    if (cfg_.mask_erode_px > 0 || cfg_.mask_dilate_px > 0) {
      d.mask = dilate(erode(d.mask, cfg_.mask_erode_px), cfg_.mask_dilate_px);
      if (d.mask.none()) continue;
      d.bbox = bbox_from_mask(d.mask);
    }
    out.push_back(std::move(d));
  }
  ++step_;
  return out;
}

void CorruptedSegmenter::on_selected(std::span<const Detection> selected) {
  inner_->on_selected(selected);
}

// --- heuristic segmenter ---------------------------------------------------

HeuristicSegmenter::HeuristicSegmenter(HeuristicOptions opts) : opts_(opts) {}

namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbours4 = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

bool similar(Rgb a, Rgb b, int tol) {
  return std::abs(a.r - b.r) <= tol && std::abs(a.g - b.g) <= tol &&
         std::abs(a.b - b.b) <= tol;
}

}  // namespace

std::vector<Detection> HeuristicSegmenter::segment(const Appearance& image) {
  const int w = image.width(), h = image.height();
  using LabelRaster =
      Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  LabelRaster labels = LabelRaster::Constant(h, w, -1);
  std::vector<long> areas;
  std::vector<bool> on_border;

  std::deque<std::pair<int, int>> queue;
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      if (labels(sy, sx) >= 0) continue;
      const int label = static_cast<int>(areas.size());
      areas.push_back(0);
      on_border.push_back(false);
      labels(sy, sx) = label;
      queue.emplace_back(sx, sy);
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        ++areas[label];
        if (x == 0 || y == 0 || x == w - 1 || y == h - 1) on_border[label] = true;
        for (const auto& [dx, dy] : kNeighbours4) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || labels(ny, nx) >= 0)
            continue;
          if (!similar(image.at(x, y), image.at(nx, ny), opts_.tolerance))
            continue;
          labels(ny, nx) = label;
          queue.emplace_back(nx, ny);
        }
      }
    }

  int background = -1;
  for (int l = 0; l < static_cast<int>(areas.size()); ++l)
    if (on_border[l] && (background < 0 || areas[l] > areas[background]))
      background = l;

  const int n = static_cast<int>(areas.size());
  std::vector<long> boundary(n, 0), shared(n, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int l = labels(y, x);
      bool is_boundary = false, touches_other = false;
      for (const auto& [dx, dy] : kNeighbours4) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
          is_boundary = true;
          continue;
        }
        const int o = labels(ny, nx);
        if (o == l) continue;
        is_boundary = true;
        if (o != background) touches_other = true;
      }
      if (is_boundary) ++boundary[l];
      if (touches_other) ++shared[l];
    }

  std::vector<Detection> out;
  for (int l = 0; l < n; ++l) {
    if (l == background || areas[l] < opts_.min_area) continue;
    Detection d;
    d.mask = Mask(BitRaster(labels == l));
    d.bbox = bbox_from_mask(d.mask);
    d.category = kNumCategories;  // otherprop
    d.class_score = 1.0;
    d.nonocc_score =
        boundary[l] == 0 ? 1.0 : 1.0 - double(shared[l]) / double(boundary[l]);
    out.push_back(std::move(d));
  }
  return out;
}

// --- oracle completer ------------------------------------------------------

OracleCompleter::OracleCompleter(Scene scene) : scene_(std::move(scene)) {}

void OracleCompleter::on_selected(std::span<const Detection> selected) {
  for (const auto& d : selected) {
    if (!d.source_id)
      throw InvalidInput("oracle completer: selection without a source id");
    if (!scene_.contains(*d.source_id))
      throw NotFound("oracle completer: unknown instance id " +
                     std::to_string(*d.source_id));
    if (!removed_.insert(*d.source_id).second)
      throw InvalidInput("oracle completer: instance " +
                         std::to_string(*d.source_id) + " removed twice");
  }
}

Appearance OracleCompleter::complete(const Appearance& image, const Mask& hole) {
  require_same_dims(image, hole, "oracle completer");
  Appearance out = image;
  if (hole.none()) return out;
  const std::vector<int> removed(removed_.begin(), removed_.end());
  paint(out, composite(scene_.without(removed)), hole);
  return out;
}

// --- harmonic inpainting ---------------------------------------------------

InpaintCompleter::InpaintCompleter(int max_iterations, double tolerance)
    : max_iterations_(max_iterations), tolerance_(tolerance) {
  if (max_iterations < 1 || !(tolerance > 0.0))
    throw InvalidInput("inpaint: need max_iterations >= 1 and tolerance > 0");
}

Appearance InpaintCompleter::complete(const Appearance& image,
                                      const Mask& hole) {
  require_same_dims(image, hole, "inpaint completer");
  Appearance out = image;
  if (hole.none()) return out;
  if (!(!hole.bits()).any())
    throw InvalidInput("inpaint: the hole covers the whole canvas");

  const int w = image.width(), h = image.height();
  std::vector<std::pair<int, int>> unknown;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (hole(x, y)) unknown.emplace_back(x, y);

  using Field = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
  for (int c = 0; c < 3; ++c) {
    Field f = image.channel(c).cast<double>();
    // Start from the mean boundary value so every iterate stays within the
    // boundary range.
    double boundary_sum = 0.0;
    long boundary_n = 0;
    for (const auto& [x, y] : unknown)
      for (const auto& [dx, dy] : kNeighbours4) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h || hole(nx, ny)) continue;
        boundary_sum += f(ny, nx);
        ++boundary_n;
      }
    const double init = boundary_n ? boundary_sum / boundary_n : 0.0;
    for (const auto& [x, y] : unknown) f(y, x) = init;

    for (int it = 0; it < max_iterations_; ++it) {
      double max_change = 0.0;
      for (const auto& [x, y] : unknown) {
        double sum = 0.0;
        int k = 0;
        for (const auto& [dx, dy] : kNeighbours4) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          sum += f(ny, nx);
          ++k;
        }
        const double v = sum / k;
        max_change = std::max(max_change, std::abs(v - f(y, x)));
        f(y, x) = v;
      }
      if (max_change < tolerance_) break;
    }
    for (const auto& [x, y] : unknown)
      out.channel(c)(y, x) =
          static_cast<std::uint8_t>(std::clamp(std::lround(f(y, x)), 0L, 255L));
  }
  return out;
}

}  // namespace amodal
