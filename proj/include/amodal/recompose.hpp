#pragma once

#include <json.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

#include "amodal/occlusion.hpp"
#include "amodal/scene.hpp"

namespace amodal {

struct Edit {
  enum class Kind { kDelete, kMove, kReorder };
  Kind kind = Kind::kDelete;
  int target = 0;
  int dx = 0;     // move
  int dy = 0;     // move
  int new_z = 0;  // reorder; clamped to [0, N-1]
};

nlohmann::json edit_to_json(const Edit& e);
Edit edit_from_json(const nlohmann::json& j);
// A JSON array of edits. Errors name the index of the offending entry.
std::vector<Edit> edit_script_from_json(const nlohmann::json& j);

// delete removes the target; move translates its amodal mask and appearance
// (pixels pushed off the canvas are dropped, with a warning); reorder moves
// it to rank new_z and renumbers ranks 0..N-1. Visibility is recomputed.
// Throws NotFound for an unknown target and InvalidInput for a move that
// leaves nothing on the canvas.
Scene apply_edit(const Scene& scene, const Edit& e,
                 std::vector<std::string>* warnings = nullptr);

// Applies `edits` in order. Errors are prefixed with the edit index.
Scene replay(const Scene& base, std::span<const Edit> edits,
             std::vector<std::string>* warnings = nullptr);

Appearance recomposite(const Scene& scene);

// Where an instance's hidden pixels came from.
enum class Provenance { kOracle, kInpainted };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// An editing session: a base scene and an edit log. The current scene is
// always the replay of the log on the base.
class Session {
 public:
  Session(std::string id, Scene base, std::map<int, Provenance> provenance);

  const std::string& id() const { return id_; }
  const Scene& base() const { return base_; }
  const Scene& current() const { return current_; }
  const std::vector<Edit>& edits() const { return edits_; }
  Provenance provenance(int instance_id) const;
  const std::map<int, Provenance>& provenance() const { return provenance_; }

  // Validates and appends; the session is unchanged when the edit fails.
  std::vector<std::string> apply(const Edit& e);
  // Drops the last edit. Returns false when the log is empty.
  bool undo();

  OcclusionMatrix graph(long overlap_threshold = 1) const;

 private:
  std::string id_;
  Scene base_;
  std::map<int, Provenance> provenance_;
  std::vector<Edit> edits_;
  Scene current_;
};

}  // namespace amodal
