#include "amodal/service.hpp"

#include <httplib.h>

#include "amodal/dataset.hpp"
#include "amodal/pipeline.hpp"
#include "amodal/png_io.hpp"
#include "amodal/rle.hpp"

namespace amodal {

using nlohmann::json;

namespace {

json bbox_json(const BBox& b) { return {b.x, b.y, b.w, b.h}; }

}  // namespace

EditableScene scene_from_request(const json& body) {
  if (!body.is_object()) throw ParseError("request body must be a JSON object");
  if (body.contains("synth")) {
    const SynthConfig cfg = synth_config_from_json(body["synth"]);
    Scene gt = generate_scene(cfg);
    auto it = body.find("decompose");
    if (it == body.end() || it->is_null())
      return editable_from_ground_truth(std::move(gt));
    if (!it->is_object()) throw ParseError("decompose must be a JSON object");
    const ComponentSpec spec =
        component_spec_from_json(it->value("components", json::object()));
    const EngineConfig engine =
        engine_config_from_json(it->value("engine", json::object()));
    StoredTrace t;
    t.width = gt.width();
    t.height = gt.height();
    t.input = composite(gt);
    t.images = true;
    t.decomposition = decompose_scene(gt, spec, engine);
    t.meta = {{"completer", spec.completer}};
    return editable_from_trace(t);
  }
  if (body.contains("trace"))
    return editable_from_trace(read_trace(body["trace"].get<std::string>()));
  if (body.contains("dataset")) {
    const int scene_id = body.value("scene_id", 0);
    for (auto& r : read_dataset(body["dataset"].get<std::string>()))
      if (r.scene_id == scene_id) return editable_from_ground_truth(std::move(r.scene));
    throw NotFound("dataset has no scene " + std::to_string(scene_id));
  }
  throw ParseError("request needs one of \"synth\", \"trace\" or \"dataset\"");
}

json session_view(const Session& s) {
  const Scene& scene = s.current();
  json instances = json::array();
  for (const auto& inst : scene.instances()) {
    json v = {{"id", inst.id},
              {"category_id", inst.category},
              {"category", std::string(category_name(inst.category))},
              {"bbox", bbox_json(bbox_from_mask(inst.amodal_mask))},
              {"z", inst.z},
              {"area", inst.amodal_mask.area()},
              {"visible_area", inst.visible_mask.area()},
              {"visible_mask", rle_to_json(inst.visible_mask)},
              {"provenance", to_string(s.provenance(inst.id))},
              {"thumbnail", "/scenes/" + s.id() + "/instance/" +
                                std::to_string(inst.id) + "/image?crop=1"}};
    v["visible_bbox"] = inst.visible_mask.none()
                            ? json(nullptr)
                            : bbox_json(bbox_from_mask(inst.visible_mask));
    instances.push_back(std::move(v));
  }
  json edits = json::array();
  for (const auto& e : s.edits()) edits.push_back(edit_to_json(e));
  return {{"id", s.id()},
          {"width", scene.width()},
          {"height", scene.height()},
          {"instances", std::move(instances)},
          {"edits", std::move(edits)}};
}

json graph_view(const Session& s) {
  const OcclusionMatrix w = s.graph();
  json edges = json::array();
  for (int i = 0; i < w.size(); ++i)
    for (int j = 0; j < w.size(); ++j)
      if (w.entries()(i, j) == 1) edges.push_back({w.ids()[i], w.ids()[j]});
  json layers = json::array();
  for (const auto& [id, layer] : absolute_order(w)) layers.push_back({id, layer});
  json out = order_to_json(w);
  out["edges"] = std::move(edges);
  out["layer_order"] = std::move(layers);
  return out;
}

namespace {

// Status and error code for an exception escaping a handler.
struct Failure {
  int status;
  std::string code;
};

Failure classify(const std::exception& e) {
  if (dynamic_cast<const SessionNotFound*>(&e)) return {404, "session_not_found"};
  if (dynamic_cast<const InvalidInput*>(&e)) return {422, "invalid_request"};
  return {500, "internal_error"};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, {{"code", code}, {"message", message}}, status);
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON body: ") + e.what());
  }
}

Appearance crop(const Appearance& a, const BBox& b) {
  Appearance out(b.w, b.h);
  for (int c = 0; c < 3; ++c) out.channel(c) = a.channel(c).block(b.y, b.x, b.h, b.w);
  return out;
}

Mask crop(const Mask& m, const BBox& b) {
  return Mask(BitRaster(m.bits().block(b.y, b.x, b.h, b.w)));
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceConfig c) : cfg(std::move(c)), store(cfg.data_dir) {}

  ServiceConfig cfg;
  SessionStore store;
  httplib::Server server;
  int port = -1;

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const std::exception& e) {
        const Failure fail = classify(e);
        send_error(res, fail.status, fail.code, e.what());
      }
    };
  }

  void routes() {
    server.set_default_headers(
        {{"Access-Control-Allow-Origin", cfg.cors_origin},
         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
         {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server.Post("/scenes", guarded([this](const auto& req, auto& res) {
      EditableScene es = scene_from_request(parse_body(req));
      const std::string id = store.create(std::move(es.scene), std::move(es.provenance));
      send_json(res, session_view(*store.snapshot(id)), 201);
    }));

    server.Get(R"(/scenes/([^/]+))", guarded([this](const auto& req, auto& res) {
      send_json(res, session_view(*store.snapshot(req.matches[1])));
    }));

    server.Get(R"(/scenes/([^/]+)/graph)", guarded([this](const auto& req, auto& res) {
      send_json(res, graph_view(*store.snapshot(req.matches[1])));
    }));

    server.Post(R"(/scenes/([^/]+)/edits)", guarded([this](const auto& req, auto& res) {
      const std::string id = req.matches[1];
      store.snapshot(id);  // 404 before looking at the body
      Edit edit;
      std::vector<std::string> warnings;
      std::shared_ptr<const Session> s;
      try {
        edit = edit_from_json(parse_body(req));
        s = store.apply(id, edit, &warnings);
      } catch (const InvalidInput& e) {
        send_error(res, 422, "invalid_edit", e.what());
        return;
      }
      json view = session_view(*s);
      view["warnings"] = warnings;
      send_json(res, view);
    }));

    server.Post(R"(/scenes/([^/]+)/undo)", guarded([this](const auto& req, auto& res) {
      const std::string id = req.matches[1];
      store.snapshot(id);
      try {
        send_json(res, session_view(*store.undo(id)));
      } catch (const InvalidInput& e) {
        send_error(res, 422, "empty_edit_log", e.what());
      }
    }));

    server.Get(R"(/scenes/([^/]+)/image)", guarded([this](const auto& req, auto& res) {
      const auto s = store.snapshot(req.matches[1]);
      res.set_content(encode_png(recomposite(s->current())), "image/png");
    }));

    server.Get(R"(/scenes/([^/]+)/instance/(-?\d+)/image)",
               guarded([this](const auto& req, auto& res) {
      const auto s = store.snapshot(req.matches[1]);
      const int iid = std::stoi(req.matches[2]);
      if (!s->current().contains(iid)) {
        send_error(res, 404, "instance_not_found",
                   "unknown instance id " + std::to_string(iid));
        return;
      }
      const InstanceRecord& inst = s->current().instance(iid);
      if (req.get_param_value("crop") == "1") {
        const BBox b = bbox_from_mask(inst.amodal_mask);
        res.set_content(encode_png_rgba(crop(inst.appearance, b), crop(inst.amodal_mask, b)),
                        "image/png");
      } else {
        res.set_content(encode_png_rgba(inst.appearance, inst.amodal_mask), "image/png");
      }
    }));

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.status == 404 && res.body.empty())
        send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    });
  }
};

Service::Service(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  if (impl_->port >= 0) return impl_->port;
  auto& c = impl_->cfg;
  if (c.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(c.host);
  } else if (impl_->server.bind_to_port(c.host, c.port)) {
    impl_->port = c.port;
  }
  if (impl_->port < 0)
    throw Error("cannot bind " + c.host + ":" + std::to_string(c.port));
  return impl_->port;
}

void Service::listen() {
  bind();
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

SessionStore& Service::store() { return impl_->store; }

}  // namespace amodal
