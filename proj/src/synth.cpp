#include "amodal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace amodal {

const std::vector<Rgb>& default_palette() {
  static const std::vector<Rgb> palette = {
      {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
      {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230},
      {0, 128, 128},  {170, 110, 40}, {128, 0, 0},    {0, 0, 128},
      {255, 0, 0},    {0, 255, 0},    {0, 0, 255},    {0, 48, 96},
      {0, 48, 160},   {0, 48, 208},   {0, 96, 0},     {0, 96, 48},
      {0, 96, 255},   {0, 160, 0},    {0, 160, 48},   {0, 160, 255}};
  return palette;
}

void SynthConfig::validate() const {
  if (width <= 0 || height <= 0)
    throw InvalidInput("synth: canvas size must be positive");
  if (min_objects < 1 || min_objects > max_objects)
    throw InvalidInput("synth: require 1 <= min_objects <= max_objects");
  if (min_size < 3 || min_size > max_size)
    throw InvalidInput("synth: require 3 <= min_size <= max_size");
  if (max_size > std::min(width, height))
    throw InvalidInput("synth: max_size exceeds the canvas");
  if (shapes.empty()) throw InvalidInput("synth: no sprite shapes enabled");
  if (static_cast<int>(palette.size()) < max_objects)
    throw InvalidInput("synth: palette smaller than max_objects");
  if (texture_noise < 0 || texture_noise > 64)
    throw InvalidInput("synth: texture_noise must lie in [0, 64]");
  if (overlap_threshold < 1)
    throw InvalidInput("synth: overlap_threshold must be >= 1");
}

namespace {

constexpr Rgb kFlatBackground{236, 232, 220};
constexpr Rgb kGradientTop{205, 212, 226};
constexpr Rgb kGradientBottom{246, 240, 228};
constexpr int kPlacementRetries = 200;

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::uint8_t jitter(Rng& rng, std::uint8_t v, int noise) {
  if (noise == 0) return v;
  return static_cast<std::uint8_t>(std::clamp(v + uniform(rng, -noise, noise), 0, 255));
}

// Rasterizes a shape inside the box [x0, x0+w) x [y0, y0+h), sampling pixel
// centres.
Mask rasterize(SpriteShape shape, int canvas_w, int canvas_h, int x0, int y0,
               int w, int h, Rng& rng) {
  Mask m(canvas_w, canvas_h);
  const double cx = x0 + w / 2.0, cy = y0 + h / 2.0;
  const double rx = w / 2.0, ry = h / 2.0;
  switch (shape) {
    case SpriteShape::kRectangle:
      m.bits().block(y0, x0, h, w).setConstant(true);
      break;
    case SpriteShape::kEllipse:
      for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) {
          const double u = (x + 0.5 - cx) / rx, v = (y + 0.5 - cy) / ry;
          if (u * u + v * v <= 1.0) m.set(x, y);
        }
      break;
    case SpriteShape::kPolygon: {
      // Vertices on the inscribed ellipse at sorted angles form a convex
      // polygon.
      const int k = uniform(rng, 3, 7);
      std::vector<double> angles(k);
      for (double& a : angles) a = uniform_real(rng, 0.0, 2 * std::numbers::pi);
      std::sort(angles.begin(), angles.end());
      std::vector<std::pair<double, double>> pts;
      for (double a : angles)
        pts.emplace_back(cx + rx * std::cos(a), cy + ry * std::sin(a));
      for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          bool inside = true;
          for (int i = 0; i < k && inside; ++i) {
            const auto [ax, ay] = pts[i];
            const auto [bx, by] = pts[(i + 1) % k];
            inside = (bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0;
          }
          if (inside) m.set(x, y);
        }
      break;
    }
  }
  return m;
}

Appearance make_background(const SynthConfig& cfg, Rng& rng) {
  Appearance bg(cfg.width, cfg.height);
  for (int y = 0; y < cfg.height; ++y) {
    Rgb base = kFlatBackground;
    if (cfg.background == BackgroundStyle::kGradient) {
      const double t = cfg.height > 1 ? y / double(cfg.height - 1) : 0.0;
      auto lerp = [t](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(a + t * (b - a)));
      };
      base = {lerp(kGradientTop.r, kGradientBottom.r),
              lerp(kGradientTop.g, kGradientBottom.g),
              lerp(kGradientTop.b, kGradientBottom.b)};
    }
    for (int x = 0; x < cfg.width; ++x)
      bg.set(x, y,
             {jitter(rng, base.r, cfg.texture_noise),
              jitter(rng, base.g, cfg.texture_noise),
              jitter(rng, base.b, cfg.texture_noise)});
  }
  return bg;
}

int lowest_row(const Mask& m) {
  const BBox b = bbox_from_mask(m);
  return b.y + b.h - 1;
}

}  // namespace

Scene generate_scene(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  // Separate stream, so the layout does not depend on texture_noise.
  Rng noise(cfg.seed ^ 0xA5A5A5A5DEADBEEFULL);
  const int n = uniform(rng, cfg.min_objects, cfg.max_objects);
  const long min_area = std::max<long>(16, long(cfg.min_size) * cfg.min_size / 8);

  std::vector<int> colour_order(cfg.palette.size());
  for (std::size_t i = 0; i < colour_order.size(); ++i) colour_order[i] = int(i);
  std::shuffle(colour_order.begin(), colour_order.end(), rng);

  std::vector<InstanceRecord> instances;
  std::set<int> bottoms;
  for (int id = 0; id < n; ++id) {
    Mask mask;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      const SpriteShape shape =
          cfg.shapes[uniform(rng, 0, int(cfg.shapes.size()) - 1)];
      const int w = uniform(rng, cfg.min_size, cfg.max_size);
      const int h = uniform(rng, cfg.min_size, cfg.max_size);
      const int x0 = uniform(rng, 0, cfg.width - w);
      const int y0 = uniform(rng, 0, cfg.height - h);
      mask = rasterize(shape, cfg.width, cfg.height, x0, y0, w, h, rng);
      if (mask.area() < min_area) continue;
      if (cfg.depth_cue == DepthCue::kLowerIsNearer &&
          bottoms.count(lowest_row(mask)))
        continue;
      placed = true;
    }
    if (!placed)
      throw Error("synth: could not place sprite " + std::to_string(id) +
                  " after " + std::to_string(kPlacementRetries) + " tries");
    bottoms.insert(lowest_row(mask));

    const Rgb colour = cfg.palette[colour_order[id]];
    Appearance look(cfg.width, cfg.height);
    for (int y = 0; y < cfg.height; ++y)
      for (int x = 0; x < cfg.width; ++x)
        if (mask(x, y))
          look.set(x, y,
                   {jitter(noise, colour.r, cfg.texture_noise),
                    jitter(noise, colour.g, cfg.texture_noise),
                    jitter(noise, colour.b, cfg.texture_noise)});

    static constexpr int kBackgroundLabels[] = {1, 2, 22};  // wall, floor, ceiling
    int category = 0;
    do {
      category = uniform(rng, 1, kNumCategories);
    } while (std::find(std::begin(kBackgroundLabels), std::end(kBackgroundLabels),
                       category) != std::end(kBackgroundLabels));

    InstanceRecord inst;
    inst.id = id;
    inst.category = category;
    inst.amodal_mask = std::move(mask);
    inst.appearance = std::move(look);
    instances.push_back(std::move(inst));
  }

  std::vector<int> ranks(n);
  for (int i = 0; i < n; ++i) ranks[i] = i;
  if (cfg.depth_cue == DepthCue::kRandom) {
    std::shuffle(ranks.begin(), ranks.end(), rng);
    for (int i = 0; i < n; ++i) instances[i].z = ranks[i];
  } else {
    std::vector<int> by_bottom(n);
    for (int i = 0; i < n; ++i) by_bottom[i] = i;
    std::sort(by_bottom.begin(), by_bottom.end(), [&](int a, int b) {
      return lowest_row(instances[a].amodal_mask) >
             lowest_row(instances[b].amodal_mask);
    });
    for (int r = 0; r < n; ++r) instances[by_bottom[r]].z = r;
  }

  Appearance background = make_background(cfg, noise);
  return Scene::assemble(cfg.width, cfg.height, std::move(background),
                         std::move(instances));
}

OcclusionMatrix ground_truth_matrix(const Scene& scene,
                                    long overlap_threshold) {
  std::vector<const InstanceRecord*> by_id;
  for (const auto& inst : scene.instances()) by_id.push_back(&inst);
  std::sort(by_id.begin(), by_id.end(),
            [](auto* a, auto* b) { return a->id < b->id; });
  std::vector<int> ids;
  for (auto* inst : by_id) ids.push_back(inst->id);
  OcclusionMatrix w = OcclusionMatrix::zeros(ids);
  for (std::size_t a = 0; a < by_id.size(); ++a)
    for (std::size_t b = a + 1; b < by_id.size(); ++b) {
      if (overlap_area(by_id[a]->amodal_mask, by_id[b]->amodal_mask) <
          overlap_threshold)
        continue;
      w.set_pair(int(a), int(b), by_id[a]->z < by_id[b]->z ? 1 : -1);
    }
  return w;
}

std::vector<std::vector<int>> peel_plan(const OcclusionMatrix& w) {
  std::vector<std::vector<int>> plan;
  OcclusionMatrix rest = w;
  while (rest.size() > 0) {
    std::vector<int> front;
    for (const auto& [id, label] : binary_labels(rest))
      if (label == 0) front.push_back(id);
    if (front.empty()) {
      absolute_order(rest);  // throws with a cycle witness
      throw InvariantViolation("peel_plan: no unoccluded instance");
    }
    rest = peel(rest, std::set<int>(front.begin(), front.end()));
    plan.push_back(std::move(front));
  }
  return plan;
}

std::vector<Appearance> layered_images(
    const Scene& scene, const std::vector<std::vector<int>>& removal_plan) {
  std::set<int> seen;
  for (const auto& step : removal_plan)
    for (int id : step) {
      if (!scene.contains(id))
        throw NotFound("layered_images: unknown id " + std::to_string(id));
      if (!seen.insert(id).second)
        throw InvalidInput("layered_images: id " + std::to_string(id) +
                           " appears in more than one step");
    }
  std::vector<Appearance> images;
  images.push_back(composite(scene));
  std::vector<int> removed;
  for (const auto& step : removal_plan) {
    removed.insert(removed.end(), step.begin(), step.end());
    images.push_back(composite(scene.without(removed)));
  }
  return images;
}

OcclusionStats occlusion_stats(const Scene& scene, long overlap_threshold) {
  OcclusionStats stats;
  const auto& insts = scene.instances();
  if (insts.empty()) return stats;
  double hidden = 0.0;
  for (const auto& inst : insts)
    hidden += 1.0 - double(inst.visible_mask.area()) / inst.amodal_mask.area();
  stats.mean_occluded_fraction = hidden / insts.size();
  double iou_sum = 0.0;
  for (std::size_t a = 0; a < insts.size(); ++a)
    for (std::size_t b = a + 1; b < insts.size(); ++b) {
      if (overlap_area(insts[a].amodal_mask, insts[b].amodal_mask) <
          overlap_threshold)
        continue;
      iou_sum += mask_iou(insts[a].amodal_mask, insts[b].amodal_mask);
      ++stats.overlapping_pairs;
    }
  if (stats.overlapping_pairs > 0)
    stats.mean_pair_iou = iou_sum / stats.overlapping_pairs;
  return stats;
}

}  // namespace amodal
