#include <doctest.h>

#include "amodal/components.hpp"
#include "amodal/engine.hpp"
#include "amodal/pipeline.hpp"
#include "amodal/synth.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace amodal;
using test::rect;

namespace {

Detection det(Mask m, double cls, double nonocc) {
  Detection d;
  d.bbox = bbox_from_mask(m);
  d.mask = std::move(m);
  d.class_score = cls;
  d.nonocc_score = nonocc;
  return d;
}

// Returns a fixed list of detections per call.
class ScriptedSegmenter : public Segmenter {
 public:
  explicit ScriptedSegmenter(std::vector<std::vector<Detection>> script)
      : script_(std::move(script)) {}
  std::vector<Detection> segment(const Appearance&) override {
    return calls_ < script_.size() ? script_[calls_++] : std::vector<Detection>{};
  }

 private:
  std::vector<std::vector<Detection>> script_;
  std::size_t calls_ = 0;
};

class FillCompleter : public Completer {
 public:
  Appearance complete(const Appearance& image, const Mask& hole) override {
    Appearance out = image;
    fill(out, hole, {1, 2, 3});
    return out;
  }
};

// Touches one pixel outside the hole from the given step on.
class LeakyCompleter : public Completer {
 public:
  explicit LeakyCompleter(int bad_step) : bad_step_(bad_step) {}
  Appearance complete(const Appearance& image, const Mask& hole) override {
    Appearance out = image;
    fill(out, hole, {1, 2, 3});
    if (calls_++ == bad_step_)
      for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
          if (!hole(x, y)) {
            Rgb c = out.at(x, y);
            c.r ^= 1;
            out.set(x, y, c);
            return out;
          }
    return out;
  }

 private:
  int bad_step_;
  int calls_ = 0;
};

// A chain of n horizontal bars, each overlapping the next, bar i at rank i.
Scene chain_scene(int n) {
  std::vector<InstanceRecord> insts;
  for (int i = 0; i < n; ++i)
    insts.push_back(test::instance(i, i, rect(8 * n + 8, 20, 8 * i, 4, 12, 12),
                                   {std::uint8_t(10 * i), 40, 90}));
  return test::scene(8 * n + 8, 20, std::move(insts));
}

}  // namespace

TEST_CASE("select_fully_visible") {
  const EngineConfig cfg;
  const Mask m = rect(8, 8, 1, 1, 3, 3);
  const std::vector<Detection> one = {det(m, 0.9, 0.9)};
  CHECK(select_fully_visible(one, cfg).size() == 1);

  // all below the non-occlusion threshold: the best one still goes
  const std::vector<Detection> three = {det(m, 0.9, 0.1), det(rect(8, 8, 4, 4, 2, 2), 0.9, 0.4),
                                        det(rect(8, 8, 0, 5, 2, 2), 0.9, 0.3)};
  const auto fallback = select_fully_visible(three, cfg);
  REQUIRE(fallback.size() == 1);
  CHECK(fallback[0].nonocc_score == 0.4);

  // both passing, ordered by non-occlusion score
  const std::vector<Detection> two = {det(m, 0.9, 0.6), det(rect(8, 8, 4, 4, 2, 2), 0.8, 0.95)};
  const auto both = select_fully_visible(two, cfg);
  REQUIRE(both.size() == 2);
  CHECK(both[0].nonocc_score == 0.95);

  CHECK_THROWS_AS(select_fully_visible(std::vector<Detection>{}, cfg), InvalidInput);
}

TEST_CASE("carve_holes") {
  std::mt19937 rng(1);
  const Appearance img = test::random_image(rng, 10, 10);
  const auto none = carve_holes(img, {});
  CHECK(none.hole.none());
  CHECK(none.image == img);

  const std::vector<Mask> disjoint = {rect(10, 10, 0, 0, 2, 2), rect(10, 10, 5, 5, 3, 3)};
  CHECK(carve_holes(img, disjoint).hole.area() == 4 + 9);

  const std::vector<Mask> overlapping = {rect(10, 10, 0, 0, 4, 4), rect(10, 10, 2, 2, 4, 4)};
  const auto c = carve_holes(img, overlapping);
  long expect = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      const bool in = overlapping[0](x, y) || overlapping[1](x, y);
      expect += in;
      CHECK(c.image.at(x, y) == (in ? kHoleFill : img.at(x, y)));
    }
  CHECK(c.hole.area() == expect);
}

TEST_CASE("decompose an empty scene") {
  const Scene s = test::scene(12, 10, {});
  OracleSegmenter seg(s);
  OracleCompleter comp(s);
  const auto d = decompose(composite(s), seg, comp, {});
  CHECK(d.trace.steps.empty());
  CHECK(d.order.size() == 0);
}

TEST_CASE("oracle round trip on synthesized scenes") {
  SynthConfig cfg;
  cfg.width = 128;
  cfg.height = 128;
  cfg.max_size = 64;
  for (int k = 0; k < 25; ++k) {
    cfg.seed = 300 + k;
    const Scene s = generate_scene(cfg);
    const auto d = decompose_scene(s, ComponentSpec{}, EngineConfig{});
    const auto gt = ground_truth_matrix(s);
    CHECK(d.trace.steps.size() <= std::min<std::size_t>(10, s.size()));

    // recovered masks equal GT amodal masks, one per instance
    std::vector<Mask> found;
    std::set<int> ids;
    for (const auto& step : d.trace.steps) {
      CHECK(!step.selected.empty());
      for (const auto& sel : step.selected) {
        found.push_back(sel.detection.mask);
        CHECK(ids.insert(sel.id).second);
      }
    }
    REQUIRE(found.size() == s.size());
    // map predicted ids onto GT ids through identical masks
    std::vector<int> to_gt(found.size(), -1);
    for (std::size_t p = 0; p < found.size(); ++p)
      for (const auto& inst : s.instances())
        if (inst.amodal_mask == found[p]) to_gt[p] = inst.id;
    for (std::size_t p = 0; p < found.size(); ++p) REQUIRE(to_gt[p] >= 0);
    for (int p = 0; p < d.order.size(); ++p)
      for (int q = 0; q < d.order.size(); ++q)
        CHECK(d.order.at(d.order.ids()[p], d.order.ids()[q]) ==
              gt.at(to_gt[d.order.ids()[p]], to_gt[d.order.ids()[q]]));
    CHECK(d.trace.steps.back().completed_image == s.background());

    // the same run again yields the same trace
    const auto again = decompose_scene(s, ComponentSpec{}, EngineConfig{});
    CHECK(again.order == d.order);
    CHECK(again.trace.steps.size() == d.trace.steps.size());
  }
}

TEST_CASE("oracle progress strictly shrinks the remaining set") {
  SynthConfig cfg;
  cfg.seed = 77;
  const Scene s = generate_scene(cfg);
  OracleSegmenter seg(s);
  OracleCompleter comp(s);
  std::size_t before = 0;
  const auto d = decompose(composite(s), seg, comp, {});
  for (const auto& step : d.trace.steps) {
    before += step.selected.size();
    CHECK(step.selected.size() >= 1);
  }
  CHECK(seg.removed().size() == before);
}

TEST_CASE("max_steps truncates a deep chain") {
  const Scene s = chain_scene(12);
  const auto gt = ground_truth_matrix(s);
  CHECK(absolute_order(gt).at(11) == 11);
  EngineConfig cfg;
  cfg.max_steps = 10;
  const auto d = decompose_scene(s, ComponentSpec{}, cfg);
  CHECK(d.trace.steps.size() == 10);
  CHECK(d.order.size() == 10);
  // the two deepest bars were never separated from the background
  EngineConfig one;
  one.max_steps = 1;
  CHECK(decompose_scene(s, ComponentSpec{}, one).trace.steps.size() == 1);
}

TEST_CASE("engine rejects a completer that writes outside the hole") {
  const Scene s = chain_scene(4);
  OracleSegmenter seg(s);
  LeakyCompleter comp(2);
  try {
    decompose(composite(s), seg, comp, {});
    FAIL("expected a contract violation");
  } catch (const ContractViolation& e) {
    CHECK(e.step() == 2);
    CHECK(std::string(e.what()).find("step 2") != std::string::npos);
  }
}

TEST_CASE("engine rejects malformed detections") {
  const Appearance img(8, 8);
  ScriptedSegmenter wrong_size({{det(rect(9, 8, 0, 0, 2, 2), 0.9, 0.9)}});
  FillCompleter fill;
  CHECK_THROWS_AS(decompose(img, wrong_size, fill, {}), ContractViolation);
  Detection empty = det(rect(8, 8, 0, 0, 2, 2), 0.9, 0.9);
  empty.mask = Mask(8, 8);
  ScriptedSegmenter empties({{empty}});
  CHECK_THROWS_AS(decompose(img, empties, fill, {}), ContractViolation);
  ScriptedSegmenter scores({{det(rect(8, 8, 0, 0, 2, 2), 1.5, 0.9)}});
  CHECK_THROWS_AS(decompose(img, scores, fill, {}), ContractViolation);
}

TEST_CASE("engine deduplicates and thresholds detections") {
  const Appearance img(10, 10);
  const Mask a = rect(10, 10, 0, 0, 5, 5);
  Mask near_a = a;
  near_a.set(5, 0);  // IoU 25/26 > 0.9
  ScriptedSegmenter seg({{det(a, 0.8, 0.9), det(near_a, 0.95, 0.9), det(rect(10, 10, 6, 6, 3, 3), 0.2, 0.9)}});
  FillCompleter fill;
  const auto d = decompose(img, seg, fill, {});
  REQUIRE(d.trace.steps.size() == 1);
  REQUIRE(d.trace.steps[0].selected.size() == 1);
  CHECK(d.trace.steps[0].selected[0].detection.class_score == 0.95);
}

TEST_CASE("same-step overlapping selections are ordered by rank") {
  const Appearance img(10, 10);
  ScriptedSegmenter seg({{det(rect(10, 10, 0, 0, 5, 5), 0.9, 0.7), det(rect(10, 10, 3, 3, 5, 5), 0.9, 0.9)}});
  FillCompleter fill;
  const auto d = decompose(img, seg, fill, {});
  REQUIRE(d.trace.steps.size() == 1);
  // id 0 is the higher non-occlusion score, removed first within the step
  CHECK(d.trace.steps[0].selected[0].detection.nonocc_score == 0.9);
  CHECK(d.order.at(0, 1) == 1);
  CHECK(validate(d.order).ok());
}

TEST_CASE("engine config validation") {
  EngineConfig c;
  c.nonocc_threshold = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = EngineConfig{};
  c.max_steps = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("scene_from_trace rebuilds the ground truth under oracles") {
  SynthConfig cfg;
  cfg.width = cfg.height = 96;
  cfg.max_size = 48;
  for (int k = 0; k < 10; ++k) {
    cfg.seed = 900 + k;
    const Scene s = generate_scene(cfg);
    const auto d = decompose_scene(s, ComponentSpec{}, EngineConfig{});
    const Scene rebuilt = scene_from_trace(composite(s), d.trace);
    CHECK(composite(rebuilt) == composite(s));
    CHECK(rebuilt.background() == s.background());
    CHECK(rebuilt.size() == s.size());
    for (const auto& inst : rebuilt.instances()) {
      bool found = false;
      for (const auto& g : s.instances())
        if (g.amodal_mask == inst.amodal_mask) {
          found = true;
          Appearance a(96, 96), b(96, 96);
          paint(a, inst.appearance, inst.amodal_mask);
          paint(b, g.appearance, g.amodal_mask);
          CHECK(a == b);
        }
      CHECK(found);
    }
  }
}
