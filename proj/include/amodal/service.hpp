#pragma once

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "amodal/pipeline.hpp"
#include "amodal/session_store.hpp"

namespace amodal {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> data_dir;
  std::string cors_origin = "*";
};

// Builds the base scene of a new session from a POST /scenes body:
//   {"synth": {...}, "decompose": {"components": {...}, "engine": {...}}}
//   {"trace": "<path to trace json>"}
//   {"dataset": "<dataset dir>", "scene_id": n}
// "decompose" is optional; without it the ground-truth scene is edited.
EditableScene scene_from_request(const nlohmann::json& body);

// Session JSON served by GET /scenes/{id} and the edit endpoints.
nlohmann::json session_view(const Session& s);
nlohmann::json graph_view(const Session& s);

// HTTP front end over a SessionStore:
//   POST /scenes                          create a session
//   GET  /scenes/{id}                     instance list
//   GET  /scenes/{id}/graph               pairwise matrix and layer orders
//   POST /scenes/{id}/edits               apply one edit
//   POST /scenes/{id}/undo                drop the last edit
//   GET  /scenes/{id}/image               recomposite (PNG)
//   GET  /scenes/{id}/instance/{iid}/image  amodal appearance (RGBA PNG,
//                                         ?crop=1 trims to the bbox)
// Errors are JSON {code, message} with status 404 (unknown session or
// instance) or 422 (invalid request or edit).
class Service {
 public:
  explicit Service(ServiceConfig cfg);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the port. Throws Error when that fails.
  int bind();
  // Serves until stop(). Binds first if needed.
  void listen();
  void stop();
  void wait_until_ready() const;

  SessionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace amodal
