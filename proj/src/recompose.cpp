#include "amodal/recompose.hpp"

#include <algorithm>

#include "amodal/synth.hpp"

namespace amodal {

using nlohmann::json;

json edit_to_json(const Edit& e) {
  switch (e.kind) {
    case Edit::Kind::kDelete:
      return {{"kind", "delete"}, {"target", e.target}};
    case Edit::Kind::kMove:
      return {{"kind", "move"}, {"target", e.target}, {"dx", e.dx}, {"dy", e.dy}};
    case Edit::Kind::kReorder:
      return {{"kind", "reorder"}, {"target", e.target}, {"new_z", e.new_z}};
  }
  return {};
}

Edit edit_from_json(const json& j) {
  try {
    Edit e;
    const auto kind = j.at("kind").get<std::string>();
    e.target = j.at("target").get<int>();
    if (kind == "delete") {
      e.kind = Edit::Kind::kDelete;
    } else if (kind == "move") {
      e.kind = Edit::Kind::kMove;
      e.dx = j.value("dx", 0);
      e.dy = j.value("dy", 0);
    } else if (kind == "reorder") {
      e.kind = Edit::Kind::kReorder;
      e.new_z = j.at("new_z").get<int>();
    } else {
      throw ParseError("edit: unknown kind \"" + kind +
                       "\" (expected delete, move or reorder)");
    }
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("edit: ") + ex.what());
  }
}

std::vector<Edit> edit_script_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("edit script must be a JSON array");
  std::vector<Edit> edits;
  for (std::size_t k = 0; k < j.size(); ++k) {
    try {
      edits.push_back(edit_from_json(j[k]));
    } catch (const ParseError& e) {
      throw ParseError("edit " + std::to_string(k) + ": " + e.what());
    }
  }
  return edits;
}

Scene apply_edit(const Scene& scene, const Edit& e,
                 std::vector<std::string>* warnings) {
  if (!scene.contains(e.target))
    throw NotFound("unknown instance id " + std::to_string(e.target));
  std::vector<InstanceRecord> insts = scene.instances();  // z ascending
  auto it = std::find_if(insts.begin(), insts.end(),
                         [&](const auto& i) { return i.id == e.target; });
  switch (e.kind) {
    case Edit::Kind::kDelete:
      insts.erase(it);
      break;
    case Edit::Kind::kMove: {
      if (e.dx == 0 && e.dy == 0) break;
      const long before = it->amodal_mask.area();
      Mask moved = translate(it->amodal_mask, e.dx, e.dy);
      if (moved.none())
        throw InvalidInput("move of instance " + std::to_string(e.target) +
                           " leaves it entirely off the canvas");
      if (moved.area() < before && warnings)
        warnings->push_back("instance " + std::to_string(e.target) +
                            " clipped at the canvas edge (" +
                            std::to_string(before - moved.area()) +
                            " px dropped)");
      it->amodal_mask = std::move(moved);
      it->appearance = translate(it->appearance, e.dx, e.dy);
      break;
    }
    case Edit::Kind::kReorder: {
      InstanceRecord moved = std::move(*it);
      insts.erase(it);
      const int n = static_cast<int>(insts.size());
      const int pos = std::clamp(e.new_z, 0, n);
      insts.insert(insts.begin() + pos, std::move(moved));
      for (int r = 0; r <= n; ++r) insts[r].z = r;
      break;
    }
  }
  return Scene::assemble(scene.width(), scene.height(), scene.background(),
                         std::move(insts));
}

Scene replay(const Scene& base, std::span<const Edit> edits,
             std::vector<std::string>* warnings) {
  Scene s = base;
  for (std::size_t k = 0; k < edits.size(); ++k) {
    try {
      s = apply_edit(s, edits[k], warnings);
    } catch (const NotFound& e) {
      throw NotFound("edit " + std::to_string(k) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput("edit " + std::to_string(k) + ": " + e.what());
    }
  }
  return s;
}

Appearance recomposite(const Scene& scene) { return composite(scene); }

std::string to_string(Provenance p) {
  return p == Provenance::kOracle ? "oracle" : "inpainted";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "oracle") return Provenance::kOracle;
  if (s == "inpainted") return Provenance::kInpainted;
  throw ParseError("unknown provenance \"" + s + "\"");
}

Session::Session(std::string id, Scene base,
                 std::map<int, Provenance> provenance)
    : id_(std::move(id)),
      base_(std::move(base)),
      provenance_(std::move(provenance)),
      current_(base_) {}

Provenance Session::provenance(int instance_id) const {
  auto it = provenance_.find(instance_id);
  return it == provenance_.end() ? Provenance::kOracle : it->second;
}

std::vector<std::string> Session::apply(const Edit& e) {
  std::vector<std::string> warnings;
  current_ = apply_edit(current_, e, &warnings);
  edits_.push_back(e);
  return warnings;
}

bool Session::undo() {
  if (edits_.empty()) return false;
  edits_.pop_back();
  current_ = replay(base_, edits_);
  return true;
}

OcclusionMatrix Session::graph(long overlap_threshold) const {
  return ground_truth_matrix(current_, overlap_threshold);
}

}  // namespace amodal
