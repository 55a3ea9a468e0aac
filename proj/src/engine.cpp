#include "amodal/engine.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

namespace amodal {

void EngineConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(class_score_threshold) || !unit(nonocc_threshold))
    throw InvalidInput("engine: thresholds must lie in [0, 1]");
  if (max_steps < 1) throw InvalidInput("engine: max_steps must be >= 1");
  if (max_detections < 1)
    throw InvalidInput("engine: max_detections must be >= 1");
  if (overlap_threshold < 1)
    throw InvalidInput("engine: overlap_threshold must be >= 1");
}

namespace {

double centroid_y(const Mask& m) {
  double sum = 0.0;
  long n = 0;
  for (int y = 0; y < m.height(); ++y) {
    const long row = m.bits().row(y).count();
    sum += double(row) * y;
    n += row;
  }
  return n == 0 ? 0.0 : sum / n;
}

}  // namespace

std::vector<Detection> select_fully_visible(std::span<const Detection> dets,
                                            const EngineConfig& cfg) {
  if (dets.empty()) throw InvalidInput("select_fully_visible: no detections");

  std::vector<double> cy(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) cy[i] = centroid_y(dets[i].mask);
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Detection& da = dets[a];
    const Detection& db = dets[b];
    if (da.nonocc_score != db.nonocc_score)
      return da.nonocc_score > db.nonocc_score;
    if (da.class_score != db.class_score) return da.class_score > db.class_score;
    if (cy[a] != cy[b]) return cy[a] < cy[b];
    return a < b;
  });

  std::vector<Detection> selected;
  for (std::size_t i : order)
    if (dets[i].class_score >= cfg.class_score_threshold &&
        dets[i].nonocc_score >= cfg.nonocc_threshold)
      selected.push_back(dets[i]);
  // At least one instance leaves every layer.
  if (selected.empty()) selected.push_back(dets[order.front()]);
  return selected;
}

CarvedImage carve_holes(const Appearance& image,
                        std::span<const Mask> selected_masks) {
  CarvedImage out{image, Mask(image.width(), image.height())};
  for (const Mask& m : selected_masks) {
    require_same_dims(image, m, "carve_holes");
    out.hole.bits() = out.hole.bits() || m.bits();
  }
  fill(out.image, out.hole, kHoleFill);
  return out;
}

namespace {

void check_detections(const std::vector<Detection>& dets,
                      const Appearance& image, int step) {
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    const std::string who = "detection " + std::to_string(i);
    if (d.mask.width() != image.width() || d.mask.height() != image.height())
      throw ContractViolation(step, who + ": mask is not canvas-sized");
    if (d.mask.none()) throw ContractViolation(step, who + ": empty mask");
    if (!(d.class_score >= 0.0 && d.class_score <= 1.0) ||
        !(d.nonocc_score >= 0.0 && d.nonocc_score <= 1.0))
      throw ContractViolation(step, who + ": score outside [0, 1]");
  }
}

void check_completion(const CarvedImage& carved, const Appearance& completed,
                      int step) {
  if (completed.width() != carved.image.width() ||
      completed.height() != carved.image.height())
    throw ContractViolation(step, "completer changed the image size");
  const auto* hole = reinterpret_cast<const std::uint8_t*>(carved.hole.bits().data());
  const Eigen::Index n = carved.hole.bits().size();
  for (int c = 0; c < 3; ++c) {
    const std::uint8_t* a = completed.channel(c).data();
    const std::uint8_t* b = carved.image.channel(c).data();
    std::uint8_t diff = 0;
    for (Eigen::Index i = 0; i < n; ++i) diff |= (a[i] ^ b[i]) & (hole[i] - 1);
    if (!diff) continue;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!hole[i] && a[i] != b[i]) {
        const int w = completed.width();
        throw ContractViolation(
            step, "completer modified pixel (" + std::to_string(i % w) + ", " +
                      std::to_string(i / w) + ") outside the hole");
      }
  }
}

// Highest class score first, capped, then near-duplicate masks removed.
std::vector<Detection> shortlist(std::vector<Detection> dets,
                                 const EngineConfig& cfg) {
  std::stable_sort(dets.begin(), dets.end(), [](const auto& a, const auto& b) {
    return a.class_score > b.class_score;
  });
  if (static_cast<int>(dets.size()) > cfg.max_detections)
    dets.resize(cfg.max_detections);
  std::vector<Detection> kept;
  for (auto& d : dets) {
    const bool duplicate =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
          return mask_iou(k.mask, d.mask) > cfg.dedup_iou;
        });
    if (!duplicate && d.class_score >= cfg.class_score_threshold)
      kept.push_back(std::move(d));
  }
  return kept;
}

}  // namespace

Decomposition decompose(const Appearance& image, Segmenter& segmenter,
                        Completer& completer, const EngineConfig& cfg) {
  cfg.validate();
  Decomposition out;
  Appearance current = image;
  int next_id = 0;
  for (int step = 0; step < cfg.max_steps; ++step) {
    std::vector<Detection> dets = segmenter.segment(current);
    check_detections(dets, current, step);
    dets = shortlist(std::move(dets), cfg);
    if (dets.empty()) break;

    std::vector<Detection> selected = select_fully_visible(dets, cfg);
    segmenter.on_selected(selected);
    completer.on_selected(selected);

    std::vector<Mask> masks;
    for (const auto& d : selected) masks.push_back(d.mask);
    CarvedImage carved = carve_holes(current, masks);
    Appearance completed = completer.complete(carved.image, carved.hole);
    check_completion(carved, completed, step);

    DecompositionStep record;
    record.step_index = step;
    for (auto& d : selected) record.selected.push_back({next_id++, std::move(d)});
    record.hole_mask = std::move(carved.hole);
    record.completed_image = completed;
    out.trace.steps.push_back(std::move(record));
    current = std::move(completed);
  }
  out.order = pairwise_from_trace(trace_masks(out.trace),
                                  removal_keys(out.trace),
                                  cfg.overlap_threshold);
  return out;
}

std::map<int, RemovalKey> removal_keys(const DecompositionTrace& trace) {
  std::map<int, RemovalKey> keys;
  for (const auto& step : trace.steps)
    for (std::size_t r = 0; r < step.selected.size(); ++r)
      keys[step.selected[r].id] = {step.step_index, static_cast<int>(r)};
  return keys;
}

std::map<int, Mask> trace_masks(const DecompositionTrace& trace) {
  std::map<int, Mask> masks;
  for (const auto& step : trace.steps)
    for (const auto& sel : step.selected)
      masks.emplace(sel.id, sel.detection.mask);
  return masks;
}

Scene scene_from_trace(const Appearance& input,
                       const DecompositionTrace& trace) {
  std::vector<InstanceRecord> instances;
  const Appearance* source = &input;
  int rank = 0;
  for (const auto& step : trace.steps) {
    for (const auto& sel : step.selected) {
      InstanceRecord inst;
      inst.id = sel.id;
      inst.category = sel.detection.category;
      inst.z = rank++;
      inst.amodal_mask = sel.detection.mask;
      inst.appearance = Appearance(input.width(), input.height());
      paint(inst.appearance, *source, inst.amodal_mask);
      instances.push_back(std::move(inst));
    }
    source = &step.completed_image;
  }
  return Scene::assemble(input.width(), input.height(), *source,
                         std::move(instances));
}

}  // namespace amodal
