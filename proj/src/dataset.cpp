#include "amodal/dataset.hpp"

#include <cstdio>
#include <algorithm>
#include <map>

#include "amodal/png_io.hpp"
#include "amodal/rle.hpp"
#include "amodal/synth.hpp"

namespace amodal {

using nlohmann::json;

namespace {

std::string scene_stem(int scene_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%06d", scene_id);
  return buf;
}

json bbox_json(const BBox& b) { return {b.x, b.y, b.w, b.h}; }

std::vector<const InstanceRecord*> by_id(const Scene& scene) {
  std::vector<const InstanceRecord*> out;
  for (const auto& inst : scene.instances()) out.push_back(&inst);
  std::sort(out.begin(), out.end(),
            [](auto* a, auto* b) { return a->id < b->id; });
  return out;
}

}  // namespace

std::string DatasetRecord::image_file() const {
  return "images/" + scene_stem(scene_id) + ".png";
}

std::string DatasetRecord::background_file() const {
  return "images/" + scene_stem(scene_id) + "_bg.png";
}

std::string DatasetRecord::appearance_file(int instance_id) const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", instance_id);
  return "images/" + scene_stem(scene_id) + "_inst_" + buf + ".png";
}

DatasetRecord make_record(int scene_id, Scene scene, long overlap_threshold) {
  DatasetRecord r;
  r.scene_id = scene_id;
  r.order = ground_truth_matrix(scene, overlap_threshold);
  r.layers = absolute_order(r.order);
  r.scene = std::move(scene);
  return r;
}

json annotations_json(std::span<const DatasetRecord> records) {
  json categories = json::array();
  for (int c = 1; c <= kNumCategories; ++c)
    categories.push_back({{"id", c}, {"name", category_name(c)}});

  json images = json::array();
  json annotations = json::array();
  long next_ann = 1;
  for (const auto& r : records) {
    images.push_back({{"id", r.scene_id},
                      {"file_name", r.image_file()},
                      {"width", r.scene.width()},
                      {"height", r.scene.height()},
                      {"background_file", r.background_file()}});
    for (const InstanceRecord* inst : by_id(r.scene)) {
      json ann = {{"id", next_ann++},
                  {"image_id", r.scene_id},
                  {"instance_id", inst->id},
                  {"category_id", inst->category},
                  {"bbox", bbox_json(bbox_from_mask(inst->amodal_mask))},
                  {"area", inst->amodal_mask.area()},
                  {"visible_area", inst->visible_mask.area()},
                  {"segmentation_amodal", rle_to_json(inst->amodal_mask)},
                  {"segmentation_visible", rle_to_json(inst->visible_mask)},
                  {"z_index", inst->z},
                  {"layer_order", r.layers.at(inst->id)},
                  {"pairwise_order", r.order.row(inst->id)},
                  {"appearance_file", r.appearance_file(inst->id)}};
      ann["visible_bbox"] = inst->visible_mask.none()
                                ? json(nullptr)
                                : bbox_json(bbox_from_mask(inst->visible_mask));
      annotations.push_back(std::move(ann));
    }
  }
  return {{"info", {{"description", "layered sprite scenes"}, {"version", 1}}},
          {"categories", std::move(categories)},
          {"images", std::move(images)},
          {"annotations", std::move(annotations)}};
}

void write_dataset(std::span<const DatasetRecord> records,
                   const std::filesystem::path& root) {
  std::filesystem::create_directories(root / "images");
  for (const auto& r : records) {
    write_png(composite(r.scene), root / r.image_file());
    write_png(r.scene.background(), root / r.background_file());
    for (const auto& inst : r.scene.instances())
      write_png(inst.appearance, root / r.appearance_file(inst.id));
  }
  write_file(root / "annotations.json", annotations_json(records).dump(1) + "\n");
}

namespace {

// JSON access that reports where a malformed document went wrong.
const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object())
    throw ParseError("annotations.json: " + where + " is not an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError("annotations.json: " + where + " lacks \"" + key + "\"");
  return *it;
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return field(obj, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("annotations.json: " + where + "." + key + ": " + e.what());
  }
}

Mask mask_at(const json& obj, const char* key, const std::string& where) {
  try {
    return rle_from_json(field(obj, key, where));
  } catch (const ParseError& e) {
    throw ParseError("annotations.json: " + where + "." + key + ": " + e.what());
  }
}

}  // namespace

std::vector<DatasetRecord> records_from_json(const json& doc,
                                             const std::filesystem::path& root) {
  const json& images = field(doc, "images", "document");
  const json& annotations = field(doc, "annotations", "document");
  if (!images.is_array() || !annotations.is_array())
    throw ParseError("annotations.json: images and annotations must be arrays");

  std::map<int, std::vector<std::size_t>> anns_by_image;
  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const std::string where = "annotations[" + std::to_string(k) + "]";
    anns_by_image[get_as<int>(annotations[k], "image_id", where)].push_back(k);
  }

  std::vector<DatasetRecord> records;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    const json& img = images[i];
    const int scene_id = get_as<int>(img, "id", where);
    const int w = get_as<int>(img, "width", where);
    const int h = get_as<int>(img, "height", where);
    Appearance background =
        read_png(root / get_as<std::string>(img, "background_file", where));
    require_same_dims(background, Appearance(w, h), where.c_str());

    std::vector<InstanceRecord> instances;
    std::vector<int> ids;
    std::vector<std::vector<int>> rows;
    std::vector<int> layer_orders;
    for (std::size_t k : anns_by_image[scene_id]) {
      const std::string aw = "annotations[" + std::to_string(k) + "]";
      const json& ann = annotations[k];
      InstanceRecord inst;
      inst.id = get_as<int>(ann, "instance_id", aw);
      inst.category = get_as<int>(ann, "category_id", aw);
      inst.z = get_as<int>(ann, "z_index", aw);
      inst.amodal_mask = mask_at(ann, "segmentation_amodal", aw);
      inst.visible_mask = mask_at(ann, "segmentation_visible", aw);
      if (inst.amodal_mask.width() != w || inst.amodal_mask.height() != h ||
          inst.visible_mask.width() != w || inst.visible_mask.height() != h)
        throw ParseError("annotations.json: " + aw +
                         ": mask size differs from the image");
      if (!is_subset(inst.visible_mask, inst.amodal_mask))
        throw InvariantViolation(aw + ": visible mask not inside amodal mask");
      inst.appearance =
          read_png(root / get_as<std::string>(ann, "appearance_file", aw));
      ids.push_back(inst.id);
      rows.push_back(get_as<std::vector<int>>(ann, "pairwise_order", aw));
      layer_orders.push_back(get_as<int>(ann, "layer_order", aw));
      instances.push_back(std::move(inst));
    }

    const std::size_t n = ids.size();
    OrderEntries entries(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      if (rows[a].size() != n)
        throw ParseError("annotations.json: " + where + ": instance " +
                         std::to_string(ids[a]) + " has a pairwise row of " +
                         std::to_string(rows[a].size()) + " entries, expected " +
                         std::to_string(n));
      for (std::size_t b = 0; b < n; ++b) entries(a, b) = rows[a][b];
    }

    DatasetRecord r;
    r.scene_id = scene_id;
    r.scene = Scene(w, h, std::move(background), std::move(instances));
    r.order = OcclusionMatrix(ids, std::move(entries));
    const auto report = validate(r.order);
    if (!report.ok())
      throw InvariantViolation(where + ": pairwise order invalid: " +
                               report.violations.front().message);
    r.layers = absolute_order(r.order);
    for (std::size_t a = 0; a < n; ++a)
      if (r.layers.at(ids[a]) != layer_orders[a])
        throw InvariantViolation(where + ": layer_order of instance " +
                                 std::to_string(ids[a]) +
                                 " disagrees with its pairwise rows");
    const auto visible = visible_masks(r.scene);
    for (const auto& inst : r.scene.instances())
      if (!(visible.at(inst.id) == inst.visible_mask))
        throw InvariantViolation(where + ": visible mask of instance " +
                                 std::to_string(inst.id) +
                                 " disagrees with the depth ranks");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& root) {
  json doc;
  try {
    doc = json::parse(read_file(root / "annotations.json"));
  } catch (const json::parse_error& e) {
    throw ParseError("annotations.json: " + std::string(e.what()));
  }
  return records_from_json(doc, root);
}

}  // namespace amodal
