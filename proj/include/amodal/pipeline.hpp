#pragma once

#include <json.hpp>

#include <memory>
#include <string>

#include "amodal/components.hpp"
#include "amodal/engine.hpp"
#include "amodal/recompose.hpp"
#include "amodal/synth.hpp"
#include "amodal/trace_io.hpp"

namespace amodal {

// Component choice for a decomposition run.
struct ComponentSpec {
  std::string segmenter = "oracle";  // oracle | corrupted | heuristic
  std::string completer = "oracle";  // oracle | inpaint
  CorruptionConfig corruption;       // used by "corrupted"
  HeuristicOptions heuristic;        // used by "heuristic"
  void validate() const;             // unknown names list the valid ones
};

// Oracle components read the ground truth, so `ground_truth` is required for
// them and ignored otherwise. `scene_index` decorrelates corruption draws
// across scenes.
std::unique_ptr<Segmenter> make_segmenter(const ComponentSpec& spec,
                                          const Scene* ground_truth,
                                          long overlap_threshold,
                                          int scene_index = 0);
std::unique_ptr<Completer> make_completer(const ComponentSpec& spec,
                                          const Scene* ground_truth);

// Decomposes the composite of `ground_truth`.
Decomposition decompose_scene(const Scene& ground_truth,
                              const ComponentSpec& spec,
                              const EngineConfig& cfg, int scene_index = 0);

Provenance completer_provenance(const std::string& completer);

// A scene ready for editing, with where each instance's pixels came from.
struct EditableScene {
  Scene scene;
  std::map<int, Provenance> provenance;
};

EditableScene editable_from_ground_truth(Scene scene);
// Uses the completed instances of the decomposition. Provenance follows the
// "completer" entry of the trace meta.
EditableScene editable_from_trace(const StoredTrace& trace);

// JSON views of the configs. The readers accept partial objects (missing
// keys keep their defaults) and reject unknown keys.
nlohmann::json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EngineConfig& cfg);
EngineConfig engine_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComponentSpec& spec);
ComponentSpec component_spec_from_json(const nlohmann::json& j);

}  // namespace amodal
