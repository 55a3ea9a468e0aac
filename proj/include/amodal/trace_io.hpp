#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "amodal/engine.hpp"

namespace amodal {

// A decomposition as stored on disk. Step images (input plus the completed
// image of every step) are optional; without them `images` is false and the
// completed images in the trace are empty.
struct StoredTrace {
  int scene_id = -1;
  int width = 0;
  int height = 0;
  Decomposition decomposition;
  std::optional<Appearance> input;
  bool images = false;
  nlohmann::json meta = nlohmann::json::object();
};

nlohmann::json order_to_json(const OcclusionMatrix& w);
OcclusionMatrix order_from_json(const nlohmann::json& j);

nlohmann::json detection_to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& j);

// Writes <dir>/<stem>.json and, when `dump_steps`, <stem>_input.png and
// <stem>_step_NN.png next to it. Returns the JSON path.
std::filesystem::path write_trace(const std::filesystem::path& dir,
                                  const std::string& stem,
                                  const StoredTrace& trace, bool dump_steps);
StoredTrace read_trace(const std::filesystem::path& json_path);

}  // namespace amodal
