#include "amodal/scene.hpp"

#include <algorithm>
#include <set>

namespace amodal {

const std::vector<std::string>& category_names() {
  static const std::vector<std::string> names = {
      "wall",           "floor",          "cabinet",      "bed",
      "chair",          "sofa",           "table",        "door",
      "window",         "bookshelf",      "picture",      "counter",
      "blinds",         "desk",           "shelves",      "curtain",
      "dresser",        "pillow",         "mirror",       "floor mat",
      "clothes",        "ceiling",        "books",        "refridgerator",
      "television",     "paper",          "towel",        "shower curtain",
      "box",            "whiteboard",     "person",       "night stand",
      "toilet",         "sink",           "lamp",         "bathtub",
      "bag",            "otherstructure", "otherfurniture", "otherprop"};
  return names;
}

std::string_view category_name(int category_id) {
  if (category_id < 1 || category_id > kNumCategories)
    throw InvalidInput("category id out of range: " +
                       std::to_string(category_id));
  return category_names()[category_id - 1];
}

int category_id(std::string_view name) {
  const auto& names = category_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw InvalidInput("unknown category: " + std::string(name));
  return static_cast<int>(it - names.begin()) + 1;
}

namespace {

void check_instance_dims(const InstanceRecord& inst, int w, int h) {
  const std::string who = "instance " + std::to_string(inst.id);
  if (inst.amodal_mask.width() != w || inst.amodal_mask.height() != h)
    throw DimensionMismatch(who + ": amodal mask does not match scene size");
  if (inst.appearance.width() != w || inst.appearance.height() != h)
    throw DimensionMismatch(who + ": appearance does not match scene size");
}

void sort_and_check_order(std::vector<InstanceRecord>& instances) {
  std::sort(instances.begin(), instances.end(),
            [](const auto& a, const auto& b) { return a.z < b.z; });
  std::set<int> ids;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (i > 0 && instances[i].z == instances[i - 1].z)
      throw InvariantViolation("duplicate z rank " +
                               std::to_string(instances[i].z));
    if (!ids.insert(instances[i].id).second)
      throw InvariantViolation("duplicate instance id " +
                               std::to_string(instances[i].id));
  }
}

}  // namespace

Scene::Scene(int width, int height, Appearance background,
             std::vector<InstanceRecord> instances)
    : width_(width),
      height_(height),
      background_(std::move(background)),
      instances_(std::move(instances)) {
  if (background_.width() != width || background_.height() != height)
    throw DimensionMismatch("background does not match scene size");
  sort_and_check_order(instances_);
  for (const auto& inst : instances_) {
    check_instance_dims(inst, width, height);
    const std::string who = "instance " + std::to_string(inst.id);
    if (inst.amodal_mask.area() < 1)
      throw InvariantViolation(who + ": empty amodal mask");
    if (inst.visible_mask.width() != width ||
        inst.visible_mask.height() != height)
      throw DimensionMismatch(who + ": visible mask does not match scene size");
    if (!is_subset(inst.visible_mask, inst.amodal_mask))
      throw InvariantViolation(who + ": visible mask not inside amodal mask");
    category_name(inst.category);
  }
}

Scene Scene::assemble(int width, int height, Appearance background,
                      std::vector<InstanceRecord> instances) {
  sort_and_check_order(instances);
  Mask covered(width, height);
  for (auto& inst : instances) {
    check_instance_dims(inst, width, height);
    inst.visible_mask = mask_minus(inst.amodal_mask, covered);
    covered = mask_union(covered, inst.amodal_mask);
  }
  return Scene(width, height, std::move(background), std::move(instances));
}

const InstanceRecord& Scene::instance(int id) const {
  for (const auto& inst : instances_)
    if (inst.id == id) return inst;
  throw NotFound("unknown instance id " + std::to_string(id));
}

bool Scene::contains(int id) const {
  return std::any_of(instances_.begin(), instances_.end(),
                     [id](const auto& inst) { return inst.id == id; });
}

std::vector<int> Scene::ids() const {
  std::vector<int> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) out.push_back(inst.id);
  return out;
}

Scene Scene::without(std::span<const int> ids) const {
  for (int id : ids)
    if (!contains(id)) throw NotFound("unknown instance id " + std::to_string(id));
  std::vector<InstanceRecord> kept;
  for (const auto& inst : instances_)
    if (std::find(ids.begin(), ids.end(), inst.id) == ids.end())
      kept.push_back(inst);
  return assemble(width_, height_, background_, std::move(kept));
}

Appearance composite(const Scene& scene) {
  Appearance out = scene.background();
  const auto& insts = scene.instances();
  for (auto it = insts.rbegin(); it != insts.rend(); ++it)
    paint(out, it->appearance, it->amodal_mask);
  return out;
}

std::map<int, Mask> visible_masks(const Scene& scene) {
  std::map<int, Mask> out;
  Mask covered(scene.width(), scene.height());
  for (const auto& inst : scene.instances()) {
    out.emplace(inst.id, mask_minus(inst.amodal_mask, covered));
    covered = mask_union(covered, inst.amodal_mask);
  }
  return out;
}

Mask background_visible(const Scene& scene) {
  BitRaster covered = BitRaster::Constant(scene.height(), scene.width(), false);
  for (const auto& inst : scene.instances())
    covered = covered || inst.amodal_mask.bits();
  return Mask(BitRaster(!covered));
}

}  // namespace amodal
