#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amodal/raster.hpp"

namespace amodal {

// Category ids are 1-based indices into the 40-name indoor label list.
constexpr int kNumCategories = 40;
std::string_view category_name(int category_id);
int category_id(std::string_view name);
const std::vector<std::string>& category_names();

struct InstanceRecord {
  int id = 0;
  int category = 1;
  int z = 0;  // 0 = frontmost
  Mask amodal_mask;
  Mask visible_mask;
  Appearance appearance;  // full (amodal) RGB, meaningful inside amodal_mask
};

// An immutable, z-sorted set of opaque instances over a background.
class Scene {
 public:
  Scene() = default;
  // Validates every invariant, including visible ⊆ amodal. Instances are
  // reordered by ascending z.
  Scene(int width, int height, Appearance background,
        std::vector<InstanceRecord> instances);

  // Like the constructor, but overwrites each visible_mask from the z-order.
  static Scene assemble(int width, int height, Appearance background,
                        std::vector<InstanceRecord> instances);

  int width() const { return width_; }
  int height() const { return height_; }
  const Appearance& background() const { return background_; }
  const std::vector<InstanceRecord>& instances() const { return instances_; }
  std::size_t size() const { return instances_.size(); }

  const InstanceRecord& instance(int id) const;
  bool contains(int id) const;
  std::vector<int> ids() const;

  // Same scene minus the given ids (visibility recomputed).
  Scene without(std::span<const int> ids) const;

 private:
  int width_ = 0;
  int height_ = 0;
  Appearance background_;
  std::vector<InstanceRecord> instances_;
};

// Painter's algorithm: background first, then instances from back to front.
Appearance composite(const Scene& scene);

// amodal_i minus the union of amodal masks of all nearer instances.
std::map<int, Mask> visible_masks(const Scene& scene);

// Pixels not covered by any instance.
Mask background_visible(const Scene& scene);

struct Detection {
  BBox bbox;
  int category = 1;
  double class_score = 0.0;
  Mask mask;
  double nonocc_score = 0.0;
  // Ground-truth instance the detection was derived from, when known. Only
  // reference components set it; the engine never relies on it.
  std::optional<int> source_id;
};

struct SelectedInstance {
  int id = 0;
  Detection detection;
};

struct DecompositionStep {
  int step_index = 0;
  // Ordered by removal priority within the step (higher nonocc first).
  std::vector<SelectedInstance> selected;
  Mask hole_mask;
  Appearance completed_image;
};

struct DecompositionTrace {
  std::vector<DecompositionStep> steps;
};

}  // namespace amodal
