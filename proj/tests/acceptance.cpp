// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "amodal/components.hpp"
#include "amodal/dataset.hpp"
#include "amodal/experiment.hpp"
#include "amodal/json_schema.hpp"
#include "amodal/pipeline.hpp"
#include "amodal/png_io.hpp"
#include "amodal/rle.hpp"
#include "amodal/synth.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace amodal;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Result()> run;
};

SynthConfig scene_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.width = 256;
  cfg.height = 256;
  cfg.min_objects = 5;
  cfg.max_objects = 12;
  cfg.seed = seed;
  return cfg;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- oracle round trip -----------------------------------------------------

Result oracle_round_trip() {
  constexpr int kScenes = 100;
  std::vector<EvalImage> images;
  int background_mismatch = 0;
  int deepest = 0;
  for (int k = 0; k < kScenes; ++k) {
    const Scene gt = generate_scene(scene_config(20000 + k));
    const auto gt_order = ground_truth_matrix(gt);
    for (const auto& [id, layer] : absolute_order(gt_order)) deepest = std::max(deepest, layer + 1);
    const Decomposition d = decompose_scene(gt, ComponentSpec{}, EngineConfig{});
    const Appearance& last =
        d.trace.steps.empty() ? composite(gt) : d.trace.steps.back().completed_image;
    if (!(last == gt.background())) ++background_mismatch;
    images.push_back(eval_image(gt, gt_order, d));
  }
  Result r;
  std::ostringstream why;
  for (double t : iou_thresholds()) {
    std::vector<ImageHits> hits;
    for (const auto& img : images)
      hits.push_back(collect_hits(img.preds, img.gts, t, SizeBucket::kAll));
    const auto ap = average_precision(hits);
    if (!ap || *ap != 1.0) {
      r.ok = false;
      why << " AP@" << t << "=" << (ap ? fmt(*ap) : "n/a");
    }
  }
  const auto oap = evaluate_oap(images);
  for (const auto& [name, e] : {std::pair{"OAP50", oap.oap50}, std::pair{"OAP75", oap.oap75},
                                std::pair{"OAP85", oap.oap85}})
    if (!e.value || *e.value != 1.0) {
      r.ok = false;
      why << " " << name << "=" << (e.value ? fmt(*e.value) : "n/a");
    }
  if (background_mismatch) {
    r.ok = false;
    why << " background mismatches=" << background_mismatch;
  }
  r.detail = "scenes=" + std::to_string(kScenes) + " pairs@0.5=" + std::to_string(oap.oap50.pairs) +
             " deepest stack=" + std::to_string(deepest) + why.str();
  return r;
}

// --- order representation --------------------------------------------------

Result order_consistency() {
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_real_distribution<double> density(0.0, 0.6);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    const OrderEntries w = oracle::random_dag(rng, n, density(rng));
    std::vector<int> ids(n);
    int next = int(rng() % 50);
    for (int& id : ids) id = (next += 1 + int(rng() % 4));
    const OcclusionMatrix m(ids, w);
    const auto layers = absolute_order(m);
    const auto labels = binary_labels(m);

    // brute force: iterate the recurrence to its fixed point
    std::vector<int> expect(n, 0);
    for (int round = 0; round <= n; ++round)
      for (int i = 0; i < n; ++i) {
        int v = 0;
        for (int j = 0; j < n; ++j)
          if (occluded_by(w, i, j)) v = std::max(v, 1 + expect[j]);
        expect[i] = v;
      }
    for (int i = 0; i < n; ++i) {
      if (layers.at(ids[i]) != expect[i]) ++mismatches;
      if (labels.at(ids[i]) != (expect[i] == 0 ? 0 : 1)) ++mismatches;
    }
  }
  return {mismatches == 0, "matrices=1000 mismatches=" + std::to_string(mismatches)};
}

// --- shift robustness ------------------------------------------------------

// Exposes one fully visible instance per step, chosen by a fixed priority
// list, so the engine removes instances in exactly that order.
class ScheduledSegmenter : public Segmenter {
 public:
  ScheduledSegmenter(const Scene& scene, std::vector<int> order)
      : oracle_(scene), order_(std::move(order)) {}

  std::vector<Detection> segment(const Appearance& image) override {
    auto dets = oracle_.segment(image);
    if (next_ >= order_.size()) return {};
    std::vector<Detection> out;
    for (auto& d : dets)
      if (d.source_id == order_[next_]) out.push_back(std::move(d));
    return out;
  }
  void on_selected(std::span<const Detection> selected) override {
    oracle_.on_selected(selected);
    next_ += selected.size();
  }

 private:
  OracleSegmenter oracle_;
  std::vector<int> order_;
  std::size_t next_ = 0;
};

// Trace order re-keyed by ground-truth id.
OcclusionMatrix gt_keyed_order(const DecompositionTrace& trace, std::map<int, int>* step_of) {
  std::map<int, Mask> masks;
  std::map<int, RemovalKey> keys;
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    int rank = 0;
    for (const auto& sel : trace.steps[s].selected) {
      const int id = *sel.detection.source_id;
      masks[id] = sel.detection.mask;
      keys[id] = {int(s), rank++};
      (*step_of)[id] = int(s);
    }
  }
  return pairwise_from_trace(masks, keys);
}

Result shift_robustness() {
  int used = 0, skipped = 0, differing_steps = 0, matrix_mismatch = 0;
  EngineConfig engine;
  engine.max_steps = 64;
  for (std::uint64_t seed = 30000; used < 200; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    const Scene gt = generate_scene(cfg);
    const auto truth = ground_truth_matrix(gt);
    const auto layers = absolute_order(truth);

    // topological order by (layer, id), then swap the first adjacent pair
    // that does not overlap and sits on different layers
    std::vector<int> order = gt.ids();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::pair(layers.at(a), a) < std::pair(layers.at(b), b);
    });
    bool swapped = false;
    for (std::size_t k = 0; k + 1 < order.size() && !swapped; ++k) {
      const int a = order[k], b = order[k + 1];
      if (layers.at(a) != layers.at(b) &&
          overlap_area(gt.instance(a).amodal_mask, gt.instance(b).amodal_mask) == 0) {
        std::swap(order[k], order[k + 1]);
        swapped = true;
      }
    }
    if (!swapped) {
      ++skipped;
      continue;
    }
    ++used;

    OracleSegmenter seg(gt);
    OracleCompleter comp(gt);
    const auto canonical = decompose(composite(gt), seg, comp, engine);
    ScheduledSegmenter forced(gt, order);
    OracleCompleter comp2(gt);
    const auto shifted = decompose(composite(gt), forced, comp2, engine);

    std::map<int, int> steps_a, steps_b;
    const auto wa = gt_keyed_order(canonical.trace, &steps_a);
    const auto wb = gt_keyed_order(shifted.trace, &steps_b);
    if (steps_a != steps_b) ++differing_steps;
    bool same = wa.ids() == wb.ids();
    for (int i : gt.ids())
      for (int j : gt.ids())
        if (same && i != j &&
            overlap_area(gt.instance(i).amodal_mask, gt.instance(j).amodal_mask) > 0)
          same = wa.at(i, j) == wb.at(i, j) && wa.at(i, j) == truth.at(i, j);
    if (!same) ++matrix_mismatch;
  }
  return {differing_steps == used && matrix_mismatch == 0,
          "scenes=" + std::to_string(used) + " (skipped " + std::to_string(skipped) +
              " without a swappable pair) step schedules differing=" +
              std::to_string(differing_steps) + " matrix mismatches=" +
              std::to_string(matrix_mismatch)};
}

// --- metric closed forms ---------------------------------------------------

Result metric_closed_forms() {
  Result r;
  std::ostringstream d;
  std::mt19937 rng(5);
  const Appearance x = test::random_image(rng, 40, 30);
  const double s = ssim(x, x);
  d << "SSIM(x,x)=" << fmt(s);
  if (std::abs(s - 1.0) > 1e-9) r.ok = false;

  // full-scale error on every fourth pixel: mean squared error 0.25
  Appearance a(16, 16, {0, 0, 0}), b = a;
  for (int y = 0; y < 16; y += 2)
    for (int xx = 0; xx < 16; xx += 2) b.set(xx, y, {255, 255, 255});
  const double p = completion_metrics(a, b).psnr;
  d << " PSNR=" << fmt(p);
  if (std::abs(p - 6.0206) > 1e-3) r.ok = false;

  const Mask g0 = test::rect(20, 20, 0, 0, 4, 4), g1 = test::rect(20, 20, 10, 10, 4, 4);
  const std::vector<GtInstance> gts = {{0, g0}, {1, g1}};
  const std::vector<PredInstance> preds = {{0, 0.9, g0}, {1, 0.4, test::rect(20, 20, 0, 14, 5, 5)}};
  const auto ap = average_precision(preds, gts, 0.5);
  d << " AP=" << (ap ? fmt(*ap) : "n/a");
  if (!ap || *ap != 0.5) r.ok = false;

  EvalImage img;
  std::vector<int> ids = {0, 1, 2, 3};
  for (int k : ids) {
    img.gts.push_back({k, test::rect(20, 20, 5 * k, 5 * k, 4, 4)});
    img.preds.push_back({k, 1.0, test::rect(20, 20, 5 * k, 5 * k, 4, 4)});
  }
  img.gt_order = OcclusionMatrix::zeros(ids);
  img.pred_order = OcclusionMatrix::zeros(ids);
  const std::pair<int, int> pairs[] = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  for (auto [i, j] : pairs) {
    img.gt_order.set_pair(i, j, 1);
    img.pred_order.set_pair(i, j, 1);
  }
  img.pred_order.set_pair(2, 3, -1);
  const auto o = oap(img, 0.5);
  d << " OAP=" << (o ? fmt(*o) : "n/a");
  if (!o || *o != 0.75) r.ok = false;
  r.detail = d.str();
  return r;
}

// --- degradation -----------------------------------------------------------

Result degradation() {
  constexpr int kScenes = 100;
  std::vector<Scene> scenes;
  std::vector<OcclusionMatrix> truths;
  for (int k = 0; k < kScenes; ++k) {
    SynthConfig cfg;
    cfg.seed = 40000 + k;
    scenes.push_back(generate_scene(cfg));
    truths.push_back(ground_truth_matrix(scenes.back()));
  }
  std::vector<double> means;
  for (int erode : {0, 2, 4, 8}) {
    ComponentSpec spec;
    spec.segmenter = "corrupted";
    spec.corruption.mask_erode_px = erode;
    spec.corruption.seed = 1;
    std::vector<EvalImage> images;
    for (int k = 0; k < kScenes; ++k)
      images.push_back(eval_image(scenes[k], truths[k],
                                  decompose_scene(scenes[k], spec, EngineConfig{}, k)));
    const auto v = evaluate_oap(images).oap.value;
    means.push_back(v ? *v : 0.0);
  }
  bool ok = means.front() - means.back() >= 0.01;
  for (std::size_t k = 1; k < means.size(); ++k) ok = ok && means[k] <= means[k - 1];
  std::string detail = "OAP at erode 0/2/4/8 px:";
  for (double m : means) detail += " " + fmt(m);
  return {ok, detail};
}

// --- baselines -------------------------------------------------------------

Result baseline_sanity() {
  int yaxis_fail = 0, area_mismatch = 0;
  long pairs = 0;
  for (int k = 0; k < 100; ++k) {
    SynthConfig cfg;
    cfg.depth_cue = DepthCue::kLowerIsNearer;
    cfg.seed = 50000 + k;
    const Scene gt = generate_scene(cfg);
    const auto truth = ground_truth_matrix(gt);
    const auto inputs = ordering_inputs(gt);
    EvalImage img = eval_image(gt, truth);
    img.pred_order = order_by_yaxis(inputs);
    const auto counts = oap_counts(img, 0.5);
    pairs += counts.total;
    if (counts.total > 0 && counts.correct != counts.total) ++yaxis_fail;

    // sort-by-area oracle: rank by area, larger ranks further back
    std::vector<int> by_area = gt.ids();
    std::stable_sort(by_area.begin(), by_area.end(), [&](int a, int b) {
      return gt.instance(a).amodal_mask.area() < gt.instance(b).amodal_mask.area();
    });
    std::map<int, int> rank;
    for (std::size_t r = 0; r < by_area.size(); ++r) {
      const int id = by_area[r];
      const bool tie_prev = r > 0 && gt.instance(by_area[r - 1]).amodal_mask.area() ==
                                         gt.instance(id).amodal_mask.area();
      rank[id] = tie_prev ? rank[by_area[r - 1]] : int(r);
    }
    const auto area = order_by_area(inputs, AreaConvention::kLargerBehind);
    for (int i : gt.ids())
      for (int j : gt.ids()) {
        if (i == j) continue;
        int expect = 0;
        if (oracle::overlap(gt.instance(i).amodal_mask, gt.instance(j).amodal_mask) > 0)
          expect = rank[i] < rank[j] ? 1 : rank[i] > rank[j] ? -1 : 0;
        if (area.at(i, j) != expect) ++area_mismatch;
      }
  }
  return {yaxis_fail == 0 && area_mismatch == 0 && pairs > 0,
          "Y-axis scenes below OAP 1: " + std::to_string(yaxis_fail) + " (pairs " +
              std::to_string(pairs) + "), area pair mismatches: " + std::to_string(area_mismatch)};
}

// --- dataset round trip ----------------------------------------------------

Result dataset_round_trip() {
  test::TempDir dir;
  std::vector<DatasetRecord> records;
  for (int k = 0; k < 50; ++k) records.push_back(make_record(k, generate_scene(scene_config(60000 + k))));
  write_dataset(records, dir.path());
  const auto back = read_dataset(dir.path());

  int differences = 0;
  if (back.size() != records.size()) ++differences;
  for (std::size_t k = 0; k < std::min(back.size(), records.size()); ++k) {
    const auto& a = records[k];
    const auto& b = back[k];
    if (a.scene_id != b.scene_id || !(a.order == b.order) || a.layers != b.layers ||
        !(a.scene.background() == b.scene.background()) || a.scene.size() != b.scene.size()) {
      ++differences;
      continue;
    }
    for (const auto& inst : a.scene.instances()) {
      if (!b.scene.contains(inst.id)) {
        ++differences;
        continue;
      }
      const auto& other = b.scene.instance(inst.id);
      if (other.z != inst.z || other.category != inst.category ||
          rle_to_json(other.amodal_mask) != rle_to_json(inst.amodal_mask) ||
          rle_to_json(other.visible_mask) != rle_to_json(inst.visible_mask) ||
          !(other.appearance == inst.appearance))
        ++differences;
    }
  }
  const nlohmann::json written = nlohmann::json::parse(read_file(dir / "annotations.json"));
  if (annotations_json(back) != written) ++differences;

  const auto schema =
      nlohmann::json::parse(read_file(std::filesystem::path(AMODAL_SOURCE_DIR) / "docs" /
                                      "annotations.schema.json"));
  const auto errors = schema_errors(written, schema);
  std::string detail = "scenes=50 differences=" + std::to_string(differences) +
                       " schema errors=" + std::to_string(errors.size());
  if (!errors.empty()) detail += " first: " + errors.front();
  return {differences == 0 && errors.empty(), detail};
}

// --- engine contract -------------------------------------------------------

class LeakyCompleter : public Completer {
 public:
  explicit LeakyCompleter(Scene scene, int bad_step) : inner_(std::move(scene)), bad_step_(bad_step) {}
  Appearance complete(const Appearance& image, const Mask& hole) override {
    Appearance out = inner_.complete(image, hole);
    if (calls_++ != bad_step_) return out;
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x)
        if (!hole(x, y)) {
          Rgb c = out.at(x, y);
          c.g ^= 0x10;
          out.set(x, y, c);
          return out;
        }
    return out;
  }
  void on_selected(std::span<const Detection> selected) override { inner_.on_selected(selected); }

 private:
  OracleCompleter inner_;
  int bad_step_;
  int calls_ = 0;
};

Result engine_contract() {
  SynthConfig cfg;
  cfg.seed = 70000;
  const Scene gt = generate_scene(cfg);
  const int bad_step = 1;
  OracleSegmenter seg(gt);
  LeakyCompleter comp(gt, bad_step);
  try {
    decompose(composite(gt), seg, comp, EngineConfig{});
  } catch (const ContractViolation& e) {
    const std::string what = e.what();
    const bool named = e.step() == bad_step && what.find("step 1") != std::string::npos;
    return {named, "rejected: \"" + what + "\""};
  }
  return {false, "misbehaving completer was accepted"};
}

}  // namespace

// With arguments, only criteria whose name contains one of them run.
int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"oracle round trip", 60.0, oracle_round_trip},
      {"order representation consistency", 5.0, order_consistency},
      {"shift robustness", 10.0, shift_robustness},
      {"metric closed forms", 0.0, metric_closed_forms},
      {"degradation monotonicity", 120.0, degradation},
      {"baseline ordering sanity", 0.0, baseline_sanity},
      {"dataset round trip", 0.0, dataset_round_trip},
      {"engine contract enforcement", 0.0, engine_contract},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    bool selected = argc < 2;
    for (int a = 1; a < argc; ++a) selected = selected || c.name.find(argv[a]) != std::string::npos;
    if (!selected) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt(secs) + " s";
    if (c.budget_s > 0) {
      timing += " (limit " + fmt(c.budget_s) + " s)";
      if (secs >= c.budget_s) r.ok = false;
    }
    std::printf("%s  %s: %s; %s\n", r.ok ? "PASS" : "FAIL", c.name.c_str(), r.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    failures += !r.ok;
  }
  return failures == 0 ? 0 : 1;
}
