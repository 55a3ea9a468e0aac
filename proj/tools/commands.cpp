#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "amodal/dataset.hpp"
#include "amodal/experiment.hpp"
#include "amodal/png_io.hpp"
#include "parallel.hpp"

namespace amodal::cli {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::uint64_t scene_seed(std::uint64_t base, int index) {
  // splitmix64 finalizer over (base, index)
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

json run_manifest(const std::string& command, json config, std::uint64_t seed,
                  json inputs, json outputs, const std::vector<std::string>& argv,
                  Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {{"command", command},
          {"config", std::move(config)},
          {"seed", seed},
          {"version", kToolVersion},
          {"inputs", std::move(inputs)},
          {"outputs", std::move(outputs)},
          {"argv", argv},
          {"wall_time_s", secs}};
}

std::string stem_of(int scene_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%06d", scene_id);
  return buf;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json cmd_synth(const SynthOptions& o, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  if (o.count < 0) throw InvalidInput("--count must be >= 0");
  o.config.validate();

  std::vector<DatasetRecord> records(o.count);
  parallel_for(o.count, o.jobs, [&](int i) {
    SynthConfig c = o.config;
    c.seed = scene_seed(o.config.seed, i);
    records[i] = make_record(i, generate_scene(c), c.overlap_threshold);
  });
  write_dataset(records, o.out);

  json scenes = json::array();
  double occluded = 0.0, pair_iou = 0.0;
  int with_pairs = 0;
  for (const auto& r : records) {
    const OcclusionStats s = occlusion_stats(r.scene, o.config.overlap_threshold);
    occluded += s.mean_occluded_fraction;
    if (s.mean_pair_iou) {
      pair_iou += *s.mean_pair_iou;
      ++with_pairs;
    }
    scenes.push_back({{"scene_id", r.scene_id},
                      {"instances", r.scene.size()},
                      {"mean_occluded_fraction", s.mean_occluded_fraction},
                      {"mean_pair_iou", optional_json(s.mean_pair_iou)},
                      {"overlapping_pairs", s.overlapping_pairs}});
  }
  json stats = {
      {"scenes", std::move(scenes)},
      {"mean_occluded_fraction",
       o.count ? json(occluded / o.count) : json(nullptr)},
      {"mean_pair_iou", with_pairs ? json(pair_iou / with_pairs) : json(nullptr)}};
  write_file(o.out / "stats.json", stats.dump(1) + "\n");

  json config = to_json(o.config);
  config["count"] = o.count;
  config["jobs"] = o.jobs;
  json m = run_manifest("synth", config, o.config.seed, json::array(),
                        {o.out.string()}, argv, start);
  write_file(o.out / "manifest.json", m.dump(1) + "\n");
  return m;
}

json cmd_decompose(const DecomposeOptions& o, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  o.components.validate();
  o.engine.validate();

  // Either a dataset (ground truth available) or one bare image.
  std::vector<DatasetRecord> records;
  std::optional<Appearance> bare;
  if (fs::is_directory(o.input)) {
    records = read_dataset(o.input);
  } else if (fs::is_regular_file(o.input)) {
    bare = read_png(o.input);
  } else {
    throw NotFound("input " + o.input.string() + " does not exist");
  }
  fs::create_directories(o.out);

  const json meta = to_json(o.components);
  const int n = bare ? 1 : static_cast<int>(records.size());
  std::vector<int> steps(n);
  parallel_for(n, o.jobs, [&](int i) {
    StoredTrace t;
    const Scene* gt = bare ? nullptr : &records[i].scene;
    t.scene_id = bare ? 0 : records[i].scene_id;
    t.input = bare ? *bare : composite(*gt);
    t.width = t.input->width();
    t.height = t.input->height();
    auto seg = make_segmenter(o.components, gt, o.engine.overlap_threshold, t.scene_id);
    auto comp = make_completer(o.components, gt);
    t.decomposition = decompose(*t.input, *seg, *comp, o.engine);
    t.images = o.dump_steps;
    t.meta = meta;
    write_trace(o.out, stem_of(t.scene_id), t, o.dump_steps);
    steps[i] = static_cast<int>(t.decomposition.trace.steps.size());
  });

  json config = {{"components", to_json(o.components)},
                 {"engine", to_json(o.engine)},
                 {"dump_steps", o.dump_steps},
                 {"jobs", o.jobs}};
  json m = run_manifest("decompose", config, o.components.corruption.seed,
                        {o.input.string()}, {o.out.string()}, argv, start);
  m["scenes"] = n;
  m["steps_per_scene"] = steps;
  write_file(o.out / "manifest.json", m.dump(1) + "\n");
  return m;
}

namespace {

std::map<int, StoredTrace> read_traces(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw NotFound("prediction directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("scene_", 0) == 0 && e.path().extension() == ".json")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::map<int, StoredTrace> out;
  for (const auto& f : files) {
    StoredTrace t = read_trace(f);
    const int id = t.scene_id;
    if (!out.emplace(id, std::move(t)).second)
      throw InvalidInput("two traces for scene " + std::to_string(id));
  }
  return out;
}

std::string id_list(const std::vector<int>& ids) {
  std::string s;
  for (int id : ids) s += (s.empty() ? "" : ", ") + std::to_string(id);
  return s;
}

json ap_json(const APReport& r) {
  return {{"AP", optional_json(r.ap)},     {"AP50", optional_json(r.ap50)},
          {"AP75", optional_json(r.ap75)}, {"APS", optional_json(r.ap_s)},
          {"APM", optional_json(r.ap_m)},  {"APL", optional_json(r.ap_l)}};
}

json oap_json(const OAPReport& r) {
  auto e = [](const OAPReport::Entry& x) {
    return json{{"value", optional_json(x.value)}, {"pairs", x.pairs}};
  };
  return {{"OAP", e(r.oap)},     {"OAP50", e(r.oap50)}, {"OAP75", e(r.oap75)},
          {"OAP85", e(r.oap85)}, {"OAPS", e(r.oap_s)},  {"OAPM", e(r.oap_m)},
          {"OAPL", e(r.oap_l)},
          {"false_relation_rate", optional_json(r.false_relation_rate)}};
}

json completion_json(const CompletionTally& t) {
  const auto m = t.mean();
  if (!m) return nullptr;
  return {{"RMSE", m->rmse}, {"SSIM", m->ssim}, {"PSNR", m->psnr}, {"count", t.count}};
}

// Fixed-width text table; the first column is left aligned.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void print(std::ostream& os) const {
    std::vector<std::size_t> width(rows_[0].size(), 0);
    for (const auto& r : rows_)
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c == 0)
          os << std::left << std::setw(int(width[c])) << r[c];
        else
          os << "  " << std::right << std::setw(int(width[c])) << r[c];
      }
      os << "\n";
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt(const std::optional<double>& v, double scale = 100.0, int digits = 1) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << *v * scale;
  return os.str();
}

std::vector<std::string> oap_row(const std::string& name, const OAPReport& r) {
  return {name,          fmt(r.oap.value),   fmt(r.oap50.value), fmt(r.oap75.value),
          fmt(r.oap85.value), fmt(r.oap_s.value), fmt(r.oap_m.value), fmt(r.oap_l.value)};
}

}  // namespace

json cmd_eval(const EvalOptions& o, const std::vector<std::string>& argv,
              std::ostream& table) {
  const auto start = Clock::now();
  const std::vector<DatasetRecord> gt = read_dataset(o.gt);

  std::map<int, StoredTrace> traces;
  if (o.pred) {
    traces = read_traces(*o.pred);
    // An empty prediction directory stands for "no detections anywhere".
    if (!traces.empty()) {
      std::set<int> gt_ids;
      for (const auto& r : gt) gt_ids.insert(r.scene_id);
      std::vector<int> extra, missing;
      for (const auto& [id, t] : traces)
        if (!gt_ids.count(id)) extra.push_back(id);
      for (int id : gt_ids)
        if (!traces.count(id)) missing.push_back(id);
      if (!extra.empty() || !missing.empty()) {
        std::string msg = "prediction and ground-truth scene ids differ:";
        if (!extra.empty()) msg += " predicted but not in ground truth: " + id_list(extra) + ";";
        if (!missing.empty()) msg += " ground truth without prediction: " + id_list(missing) + ";";
        msg.pop_back();
        throw InvalidInput(msg);
      }
    }
  }

  const int n = static_cast<int>(gt.size());
  std::vector<EvalImage> images(n);
  std::vector<std::array<EvalImage, 4>> baseline(n);
  std::vector<CompletionReport> completion(n);
  std::vector<bool> has_completion(n, false);
  parallel_for(n, o.jobs, [&](int i) {
    const DatasetRecord& r = gt[i];
    if (!o.pred) {
      images[i] = eval_image(r.scene, r.order);
      if (o.baselines)
        baseline[i] = baseline_images(images[i], ordering_inputs(r.scene), r.layers,
                                      o.overlap_threshold);
      return;
    }
    auto it = traces.find(r.scene_id);
    if (it == traces.end()) {
      images[i] = eval_image(r.scene, r.order, Decomposition{{}, OcclusionMatrix::zeros({})});
    } else {
      const StoredTrace& t = it->second;
      if (t.width != r.scene.width() || t.height != r.scene.height())
        throw InvalidInput("scene " + std::to_string(r.scene_id) +
                           ": trace size differs from the ground truth");
      images[i] = eval_image(r.scene, r.order, t.decomposition);
      if (t.images) {
        completion[i] = completion_report(r.scene, editable_from_trace(t).scene);
        has_completion[i] = true;
      }
    }
    if (o.baselines) {
      const auto& trace = it == traces.end() ? DecompositionTrace{} : it->second.decomposition.trace;
      baseline[i] = baseline_images(images[i], ordering_inputs(trace),
                                    absolute_order(images[i].pred_order),
                                    o.overlap_threshold);
    }
  });

  const APReport ap = evaluate_ap(images);
  const OAPReport oap = evaluate_oap(images);
  CompletionReport comp;
  bool any_completion = false;
  for (int i = 0; i < n; ++i)
    if (has_completion[i]) {
      comp.objects += completion[i].objects;
      comp.background += completion[i].background;
      any_completion = true;
    }

  json report = {{"scenes", n},
                 {"source", o.pred ? "decomposition" : "ground truth"},
                 {"mask_ap", ap_json(ap)},
                 {"oap", oap_json(oap)}};
  report["completion"] =
      any_completion ? json{{"objects", completion_json(comp.objects)},
                            {"background", completion_json(comp.background)}}
                     : json(nullptr);

  std::ostringstream text;
  text << "Mask AP (" << n << " scenes)\n";
  Table t1({"", "AP", "AP50", "AP75", "APS", "APM", "APL"});
  t1.add({o.pred ? "decomposition" : "ground truth", fmt(ap.ap), fmt(ap.ap50),
          fmt(ap.ap75), fmt(ap.ap_s), fmt(ap.ap_m), fmt(ap.ap_l)});
  t1.print(text);
  text << "\nOcclusion order (OAP over pairs with a ground-truth relation)\n";
  Table t2({"Ordering Algorithm", "OAP", "OAP50", "OAP75", "OAP85", "OAPS", "OAPM", "OAPL"});
  t2.add(oap_row("pairwise (trace)", oap));

  if (o.baselines) {
    json rows = json::array();
    for (std::size_t b = 0; b < baseline_names().size(); ++b) {
      std::vector<EvalImage> variant;
      for (int i = 0; i < n; ++i) variant.push_back(std::move(baseline[i][b]));
      const OAPReport r = evaluate_oap(variant);
      json row = oap_json(r);
      row["name"] = baseline_names()[b];
      rows.push_back(std::move(row));
      t2.add(oap_row(baseline_names()[b], r));
    }
    report["baselines"] = std::move(rows);
  }
  t2.print(text);
  text << "false relation rate at IoU 0.5: " << fmt(oap.false_relation_rate) << "\n";
  if (any_completion) {
    text << "\nCompletion\n";
    Table t3({"", "RMSE", "SSIM", "PSNR"});
    for (const auto& [name, tally] : {std::pair{"objects", comp.objects},
                                      std::pair{"background", comp.background}}) {
      const auto m = tally.mean();
      t3.add({name, fmt(m ? std::optional(m->rmse) : std::nullopt, 1.0, 4),
              fmt(m ? std::optional(m->ssim) : std::nullopt, 1.0, 4),
              fmt(m ? std::optional(m->psnr) : std::nullopt, 1.0, 2)});
    }
    t3.print(text);
  }

  fs::create_directories(o.out);
  write_file(o.out / "report.json", report.dump(1) + "\n");
  write_file(o.out / "report.txt", text.str());
  table << text.str();

  json config = {{"baselines", o.baselines},
                 {"overlap_threshold", o.overlap_threshold},
                 {"jobs", o.jobs}};
  json inputs = {o.gt.string()};
  if (o.pred) inputs.push_back(o.pred->string());
  json m = run_manifest("eval", config, 0, inputs,
                        {(o.out / "report.json").string(), (o.out / "report.txt").string()},
                        argv, start);
  write_file(o.out / "manifest.json", m.dump(1) + "\n");
  m["report"] = report;
  return m;
}

json cmd_recompose(const RecomposeOptions& o, const std::vector<std::string>& argv,
                   std::ostream& log) {
  const auto start = Clock::now();
  if (o.trace.has_value() == o.dataset.has_value())
    throw InvalidInput("give exactly one of --trace or --dataset");

  EditableScene base;
  json inputs;
  if (o.trace) {
    base = editable_from_trace(read_trace(*o.trace));
    inputs = {o.trace->string()};
  } else {
    bool found = false;
    for (auto& r : read_dataset(*o.dataset))
      if (r.scene_id == o.scene_id) {
        base = editable_from_ground_truth(std::move(r.scene));
        found = true;
      }
    if (!found) throw NotFound("dataset has no scene " + std::to_string(o.scene_id));
    inputs = {o.dataset->string()};
  }

  json script;
  try {
    script = json::parse(read_file(o.edits));
  } catch (const json::parse_error& e) {
    throw ParseError(o.edits.string() + ": " + e.what());
  }
  const std::vector<Edit> edits = edit_script_from_json(script);
  std::vector<std::string> warnings;
  const Scene edited = replay(base.scene, edits, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  write_png(recomposite(edited), o.out);
  inputs.push_back(o.edits.string());

  json config = {{"scene_id", o.scene_id}, {"edits", script}};
  json m = run_manifest("recompose", config, 0, inputs, {o.out.string()}, argv, start);
  m["warnings"] = warnings;
  fs::path mpath = o.out;
  mpath.replace_extension(".manifest.json");
  write_file(mpath, m.dump(1) + "\n");
  return m;
}

}  // namespace amodal::cli
