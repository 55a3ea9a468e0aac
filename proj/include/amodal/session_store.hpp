#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "amodal/recompose.hpp"

namespace amodal {

class SessionNotFound : public NotFound {
 public:
  explicit SessionNotFound(const std::string& id)
      : NotFound("unknown session \"" + id + "\"") {}
};

// Thread-safe set of editing sessions. Writers to one session are serialized;
// readers get an immutable snapshot and never block on a writer.
//
// With a directory, each session is kept in <dir>/<id>/ as session.json (edit
// log and provenance) next to base/, a one-scene dataset holding the base
// scene. Existing sessions are loaded on construction.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt);

  std::string create(Scene base, std::map<int, Provenance> provenance);
  std::shared_ptr<const Session> snapshot(const std::string& id) const;
  // Both return the snapshot after the change. apply() forwards edit errors
  // and leaves the session untouched on failure; undo() throws InvalidInput
  // on an empty log.
  std::shared_ptr<const Session> apply(const std::string& id, const Edit& e,
                                       std::vector<std::string>* warnings);
  std::shared_ptr<const Session> undo(const std::string& id);
  std::vector<std::string> ids() const;

 private:
  struct Entry {
    std::mutex writer;
    mutable std::mutex swap;
    std::shared_ptr<const Session> state;
  };
  Entry& entry(const std::string& id) const;
  void publish(Entry& e, std::shared_ptr<const Session> s, bool base_changed);
  void load();

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  int next_id_ = 1;
};

}  // namespace amodal
