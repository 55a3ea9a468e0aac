#include "amodal/pipeline.hpp"

#include <algorithm>
#include <set>

namespace amodal {

using nlohmann::json;

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

bool known(const std::vector<std::string>& names, const std::string& n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& keys,
                         const char* what) {
  if (!j.is_object())
    throw ParseError(std::string(what) + ": expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k))
      throw ParseError(std::string(what) + ": unknown key \"" + k + "\"");
}

template <typename T>
void read(const json& j, const char* key, T& out, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + "." + key + ": " + e.what());
  }
}

const char* shape_name(SpriteShape s) {
  switch (s) {
    case SpriteShape::kRectangle: return "rectangle";
    case SpriteShape::kEllipse: return "ellipse";
    case SpriteShape::kPolygon: return "polygon";
  }
  return "";
}

SpriteShape shape_from(const std::string& s) {
  if (s == "rectangle") return SpriteShape::kRectangle;
  if (s == "ellipse") return SpriteShape::kEllipse;
  if (s == "polygon") return SpriteShape::kPolygon;
  throw ParseError("synth: unknown shape \"" + s +
                   "\" (expected rectangle, ellipse or polygon)");
}

}  // namespace

void ComponentSpec::validate() const {
  if (!known(segmenter_names(), segmenter))
    throw InvalidInput("unknown segmenter \"" + segmenter +
                       "\"; valid names: " + joined(segmenter_names()));
  if (!known(completer_names(), completer))
    throw InvalidInput("unknown completer \"" + completer +
                       "\"; valid names: " + joined(completer_names()));
  corruption.validate();
}

std::unique_ptr<Segmenter> make_segmenter(const ComponentSpec& spec,
                                          const Scene* ground_truth,
                                          long overlap_threshold,
                                          int scene_index) {
  spec.validate();
  if (spec.segmenter == "heuristic")
    return std::make_unique<HeuristicSegmenter>(spec.heuristic);
  if (!ground_truth)
    throw InvalidInput("segmenter \"" + spec.segmenter +
                       "\" needs ground-truth scenes as input");
  auto oracle =
      std::make_unique<OracleSegmenter>(*ground_truth, overlap_threshold);
  if (spec.segmenter == "oracle") return oracle;
  CorruptionConfig c = spec.corruption;
  c.seed = c.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(scene_index);
  return std::make_unique<CorruptedSegmenter>(std::move(oracle), c);
}

std::unique_ptr<Completer> make_completer(const ComponentSpec& spec,
                                          const Scene* ground_truth) {
  spec.validate();
  if (spec.completer == "inpaint") return std::make_unique<InpaintCompleter>();
  if (!ground_truth)
    throw InvalidInput("completer \"oracle\" needs ground-truth scenes as input");
  return std::make_unique<OracleCompleter>(*ground_truth);
}

Decomposition decompose_scene(const Scene& ground_truth,
                              const ComponentSpec& spec,
                              const EngineConfig& cfg, int scene_index) {
  auto seg = make_segmenter(spec, &ground_truth, cfg.overlap_threshold,
                            scene_index);
  auto comp = make_completer(spec, &ground_truth);
  return decompose(composite(ground_truth), *seg, *comp, cfg);
}

Provenance completer_provenance(const std::string& completer) {
  return completer == "oracle" ? Provenance::kOracle : Provenance::kInpainted;
}

EditableScene editable_from_ground_truth(Scene scene) {
  EditableScene out{std::move(scene), {}};
  for (int id : out.scene.ids()) out.provenance[id] = Provenance::kOracle;
  return out;
}

EditableScene editable_from_trace(const StoredTrace& trace) {
  if (!trace.images || !trace.input)
    throw InvalidInput(
        "trace has no step images; decompose again with --dump-steps");
  const std::string completer =
      trace.meta.is_object() ? trace.meta.value("completer", "inpaint") : "inpaint";
  EditableScene out{scene_from_trace(*trace.input, trace.decomposition.trace), {}};
  for (int id : out.scene.ids())
    out.provenance[id] = completer_provenance(completer);
  return out;
}

json to_json(const SynthConfig& cfg) {
  json shapes = json::array();
  for (auto s : cfg.shapes) shapes.push_back(shape_name(s));
  return {{"width", cfg.width},
          {"height", cfg.height},
          {"min_objects", cfg.min_objects},
          {"max_objects", cfg.max_objects},
          {"shapes", shapes},
          {"min_size", cfg.min_size},
          {"max_size", cfg.max_size},
          {"background",
           cfg.background == BackgroundStyle::kFlat ? "flat" : "gradient"},
          {"depth_cue",
           cfg.depth_cue == DepthCue::kRandom ? "random" : "lower_is_nearer"},
          {"texture_noise", cfg.texture_noise},
          {"overlap_threshold", cfg.overlap_threshold},
          {"seed", cfg.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"width", "height", "min_objects", "max_objects",
                       "shapes", "min_size", "max_size", "background",
                       "depth_cue", "texture_noise", "overlap_threshold",
                       "seed"},
                      "synth");
  SynthConfig c;
  read(j, "width", c.width, "synth");
  read(j, "height", c.height, "synth");
  read(j, "min_objects", c.min_objects, "synth");
  read(j, "max_objects", c.max_objects, "synth");
  read(j, "min_size", c.min_size, "synth");
  read(j, "max_size", c.max_size, "synth");
  read(j, "texture_noise", c.texture_noise, "synth");
  read(j, "overlap_threshold", c.overlap_threshold, "synth");
  read(j, "seed", c.seed, "synth");
  std::vector<std::string> shapes;
  read(j, "shapes", shapes, "synth");
  if (j.contains("shapes")) {
    c.shapes.clear();
    for (const auto& s : shapes) c.shapes.push_back(shape_from(s));
  }
  std::string bg = "flat", cue = "random";
  read(j, "background", bg, "synth");
  read(j, "depth_cue", cue, "synth");
  if (bg != "flat" && bg != "gradient")
    throw ParseError("synth: background must be flat or gradient");
  if (cue != "random" && cue != "lower_is_nearer")
    throw ParseError("synth: depth_cue must be random or lower_is_nearer");
  c.background = bg == "flat" ? BackgroundStyle::kFlat : BackgroundStyle::kGradient;
  c.depth_cue = cue == "random" ? DepthCue::kRandom : DepthCue::kLowerIsNearer;
  c.validate();
  return c;
}

json to_json(const EngineConfig& cfg) {
  return {{"class_threshold", cfg.class_score_threshold},
          {"nonocc_threshold", cfg.nonocc_threshold},
          {"max_steps", cfg.max_steps},
          {"max_detections", cfg.max_detections},
          {"overlap_threshold", cfg.overlap_threshold},
          {"dedup_iou", cfg.dedup_iou}};
}

EngineConfig engine_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"class_threshold", "nonocc_threshold", "max_steps",
                       "max_detections", "overlap_threshold", "dedup_iou"},
                      "engine");
  EngineConfig c;
  read(j, "class_threshold", c.class_score_threshold, "engine");
  read(j, "nonocc_threshold", c.nonocc_threshold, "engine");
  read(j, "max_steps", c.max_steps, "engine");
  read(j, "max_detections", c.max_detections, "engine");
  read(j, "overlap_threshold", c.overlap_threshold, "engine");
  read(j, "dedup_iou", c.dedup_iou, "engine");
  c.validate();
  return c;
}

json to_json(const ComponentSpec& spec) {
  json j = {{"segmenter", spec.segmenter}, {"completer", spec.completer}};
  if (spec.segmenter == "corrupted")
    j["corruption"] = {{"mask_erode_px", spec.corruption.mask_erode_px},
                       {"mask_dilate_px", spec.corruption.mask_dilate_px},
                       {"label_flip_prob", spec.corruption.label_flip_prob},
                       {"drop_prob", spec.corruption.drop_prob},
                       {"seed", spec.corruption.seed}};
  if (spec.segmenter == "heuristic")
    j["heuristic"] = {{"tolerance", spec.heuristic.tolerance},
                      {"min_area", spec.heuristic.min_area}};
  return j;
}

ComponentSpec component_spec_from_json(const json& j) {
  reject_unknown_keys(j, {"segmenter", "completer", "corruption", "heuristic"},
                      "components");
  ComponentSpec s;
  read(j, "segmenter", s.segmenter, "components");
  read(j, "completer", s.completer, "components");
  if (auto c = j.find("corruption"); c != j.end()) {
    reject_unknown_keys(*c,
                        {"mask_erode_px", "mask_dilate_px", "label_flip_prob",
                         "drop_prob", "seed"},
                        "corruption");
    read(*c, "mask_erode_px", s.corruption.mask_erode_px, "corruption");
    read(*c, "mask_dilate_px", s.corruption.mask_dilate_px, "corruption");
    read(*c, "label_flip_prob", s.corruption.label_flip_prob, "corruption");
    read(*c, "drop_prob", s.corruption.drop_prob, "corruption");
    read(*c, "seed", s.corruption.seed, "corruption");
  }
  if (auto h = j.find("heuristic"); h != j.end()) {
    reject_unknown_keys(*h, {"tolerance", "min_area"}, "heuristic");
    read(*h, "tolerance", s.heuristic.tolerance, "heuristic");
    read(*h, "min_area", s.heuristic.min_area, "heuristic");
  }
  s.validate();
  return s;
}

}  // namespace amodal
