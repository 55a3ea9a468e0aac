#pragma once

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "amodal/occlusion.hpp"
#include "amodal/scene.hpp"

namespace amodal {

// One annotated scene. Annotations are emitted in ascending instance id
// order, which is also the row/column order of `order`.
struct DatasetRecord {
  int scene_id = 0;
  Scene scene;
  OcclusionMatrix order;
  LayerOrderAssignment layers;

  std::string image_file() const;       // composite, relative to the root
  std::string background_file() const;  // empty room
  std::string appearance_file(int instance_id) const;
};

DatasetRecord make_record(int scene_id, Scene scene, long overlap_threshold = 1);

// Layout: <root>/annotations.json plus <root>/images/*.png (composite,
// background and one full-canvas appearance per instance). Masks are stored
// as uncompressed COCO run-length encodings.
void write_dataset(std::span<const DatasetRecord> records,
                   const std::filesystem::path& root);
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& root);

// The annotations.json document for `records`.
nlohmann::json annotations_json(std::span<const DatasetRecord> records);

// Parses an annotations document, loading images relative to `root`. Throws
// ParseError naming the offending JSON location, or InvariantViolation.
std::vector<DatasetRecord> records_from_json(const nlohmann::json& doc,
                                             const std::filesystem::path& root);

}  // namespace amodal
