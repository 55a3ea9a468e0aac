#include "amodal/trace_io.hpp"

#include <cstdio>

#include "amodal/png_io.hpp"
#include "amodal/rle.hpp"

namespace amodal {

using nlohmann::json;

json order_to_json(const OcclusionMatrix& w) {
  json rows = json::array();
  for (int id : w.ids()) rows.push_back(w.row(id));
  return {{"ids", w.ids()}, {"rows", std::move(rows)}};
}

OcclusionMatrix order_from_json(const json& j) {
  try {
    const auto ids = j.at("ids").get<std::vector<int>>();
    const auto rows = j.at("rows").get<std::vector<std::vector<int>>>();
    const auto n = static_cast<Eigen::Index>(ids.size());
    if (static_cast<Eigen::Index>(rows.size()) != n)
      throw ParseError("order: row count differs from id count");
    OrderEntries e(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      if (static_cast<Eigen::Index>(rows[a].size()) != n)
        throw ParseError("order: row " + std::to_string(a) + " has wrong length");
      for (Eigen::Index b = 0; b < n; ++b) e(a, b) = rows[a][b];
    }
    return OcclusionMatrix(ids, std::move(e));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("order: ") + ex.what());
  }
}

json detection_to_json(const Detection& d) {
  json j = {{"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
            {"category_id", d.category},
            {"class_score", d.class_score},
            {"nonocc_score", d.nonocc_score},
            {"mask", rle_to_json(d.mask)}};
  j["source_id"] = d.source_id ? json(*d.source_id) : json(nullptr);
  return j;
}

Detection detection_from_json(const json& j) {
  try {
    Detection d;
    const auto b = j.at("bbox").get<std::vector<int>>();
    if (b.size() != 4) throw ParseError("detection: bbox needs 4 entries");
    d.bbox = {b[0], b[1], b[2], b[3]};
    d.category = j.at("category_id").get<int>();
    d.class_score = j.at("class_score").get<double>();
    d.nonocc_score = j.at("nonocc_score").get<double>();
    d.mask = rle_from_json(j.at("mask"));
    if (j.contains("source_id") && !j["source_id"].is_null())
      d.source_id = j["source_id"].get<int>();
    return d;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("detection: ") + ex.what());
  }
}

namespace {

std::string step_file(const std::string& stem, int step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_step_%02d.png", step);
  return stem + buf;
}

}  // namespace

std::filesystem::path write_trace(const std::filesystem::path& dir,
                                  const std::string& stem,
                                  const StoredTrace& trace, bool dump_steps) {
  std::filesystem::create_directories(dir);
  json steps = json::array();
  for (const auto& step : trace.decomposition.trace.steps) {
    json selected = json::array();
    for (const auto& sel : step.selected) {
      json s = detection_to_json(sel.detection);
      s["id"] = sel.id;
      selected.push_back(std::move(s));
    }
    json s = {{"step_index", step.step_index},
              {"selected", std::move(selected)},
              {"hole", rle_to_json(step.hole_mask)}};
    if (dump_steps) {
      const std::string name = step_file(stem, step.step_index);
      write_png(step.completed_image, dir / name);
      s["completed_image"] = name;
    } else {
      s["completed_image"] = nullptr;
    }
    steps.push_back(std::move(s));
  }

  json layers = json::array();
  if (validate(trace.decomposition.order).ok())
    for (const auto& [id, layer] : absolute_order(trace.decomposition.order))
      layers.push_back({id, layer});

  json doc = {{"scene_id", trace.scene_id},
              {"width", trace.width},
              {"height", trace.height},
              {"steps", std::move(steps)},
              {"order", order_to_json(trace.decomposition.order)},
              {"layer_order", std::move(layers)},
              {"meta", trace.meta}};
  if (dump_steps && trace.input) {
    const std::string name = stem + "_input.png";
    write_png(*trace.input, dir / name);
    doc["input_image"] = name;
  } else {
    doc["input_image"] = nullptr;
  }
  const auto path = dir / (stem + ".json");
  write_file(path, doc.dump(1) + "\n");
  return path;
}

StoredTrace read_trace(const std::filesystem::path& json_path) {
  json doc;
  try {
    doc = json::parse(read_file(json_path));
  } catch (const json::parse_error& e) {
    throw ParseError(json_path.string() + ": " + e.what());
  }
  const auto dir = json_path.parent_path();
  StoredTrace out;
  try {
    out.scene_id = doc.at("scene_id").get<int>();
    out.width = doc.at("width").get<int>();
    out.height = doc.at("height").get<int>();
    if (doc.contains("meta")) out.meta = doc["meta"];
    out.images = !doc.at("input_image").is_null();
    if (out.images) out.input = read_png(dir / doc["input_image"].get<std::string>());
    for (const auto& s : doc.at("steps")) {
      DecompositionStep step;
      step.step_index = s.at("step_index").get<int>();
      for (const auto& sel : s.at("selected"))
        step.selected.push_back({sel.at("id").get<int>(), detection_from_json(sel)});
      step.hole_mask = rle_from_json(s.at("hole"));
      if (!s.at("completed_image").is_null())
        step.completed_image =
            read_png(dir / s["completed_image"].get<std::string>());
      else
        out.images = false;
      out.decomposition.trace.steps.push_back(std::move(step));
    }
    out.decomposition.order = order_from_json(doc.at("order"));
  } catch (const json::exception& e) {
    throw ParseError(json_path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace amodal
