#include "amodal/session_store.hpp"

#include <algorithm>
#include <cstdio>

#include "amodal/dataset.hpp"
#include "amodal/png_io.hpp"

namespace amodal {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json session_json(const Session& s) {
  json edits = json::array();
  for (const auto& e : s.edits()) edits.push_back(edit_to_json(e));
  json prov = json::object();
  for (const auto& [id, p] : s.provenance()) prov[std::to_string(id)] = to_string(p);
  return {{"id", s.id()}, {"edits", edits}, {"provenance", prov}};
}

}  // namespace

SessionStore::SessionStore(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    fs::create_directories(*dir_);
    load();
  }
}

void SessionStore::load() {
  std::vector<fs::path> found;
  for (const auto& d : fs::directory_iterator(*dir_))
    if (d.is_directory() && fs::exists(d.path() / "session.json"))
      found.push_back(d.path());
  std::sort(found.begin(), found.end());
  for (const auto& path : found) {
    json doc;
    try {
      doc = json::parse(read_file(path / "session.json"));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + "/session.json: " + e.what());
    }
    const std::string id = doc.at("id").get<std::string>();
    auto records = read_dataset(path / "base");
    if (records.size() != 1)
      throw ParseError(path.string() + ": base dataset must hold one scene");
    std::map<int, Provenance> prov;
    for (const auto& [k, v] : doc.at("provenance").items())
      prov[std::stoi(k)] = provenance_from_string(v.get<std::string>());
    auto s = std::make_shared<Session>(id, std::move(records[0].scene), prov);
    for (const auto& e : edit_script_from_json(doc.at("edits"))) s->apply(e);
    auto entry = std::make_unique<Entry>();
    entry->state = std::move(s);
    sessions_[id] = std::move(entry);
    int n = 0;
    if (std::sscanf(id.c_str(), "s%d", &n) == 1) next_id_ = std::max(next_id_, n + 1);
  }
}

std::string SessionStore::create(Scene base,
                                  std::map<int, Provenance> provenance) {
  std::string id;
  auto entry = std::make_unique<Entry>();
  Entry* raw = entry.get();
  std::lock_guard writer(raw->writer);
  {
    std::lock_guard lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%04d", next_id_++);
    id = buf;
    raw->state = std::make_shared<Session>(id, std::move(base), std::move(provenance));
    sessions_[id] = std::move(entry);
  }
  publish(*raw, raw->state, true);
  return id;
}

SessionStore::Entry& SessionStore::entry(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return *it->second;
}

std::shared_ptr<const Session> SessionStore::snapshot(const std::string& id) const {
  Entry& e = entry(id);
  std::lock_guard lock(e.swap);
  return e.state;
}

void SessionStore::publish(Entry& e, std::shared_ptr<const Session> s,
                           bool base_changed) {
  if (dir_) {
    const fs::path root = *dir_ / s->id();
    if (base_changed) {
      const DatasetRecord rec = make_record(0, s->base());
      write_dataset(std::span<const DatasetRecord>(&rec, 1), root / "base");
    }
    write_file(root / "session.json", session_json(*s).dump(1) + "\n");
  }
  std::lock_guard lock(e.swap);
  e.state = std::move(s);
}

std::shared_ptr<const Session> SessionStore::apply(
    const std::string& id, const Edit& edit, std::vector<std::string>* warnings) {
  Entry& e = entry(id);
  std::lock_guard writer(e.writer);
  auto next = std::make_shared<Session>(*snapshot(id));
  auto w = next->apply(edit);
  if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  publish(e, next, false);
  return next;
}

std::shared_ptr<const Session> SessionStore::undo(const std::string& id) {
  Entry& e = entry(id);
  std::lock_guard writer(e.writer);
  auto next = std::make_shared<Session>(*snapshot(id));
  if (!next->undo()) throw InvalidInput("nothing to undo");
  publish(e, next, false);
  return next;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, e] : sessions_) out.push_back(id);
  return out;
}

}  // namespace amodal
