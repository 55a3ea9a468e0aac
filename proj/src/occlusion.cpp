#include "amodal/occlusion.hpp"

#include <algorithm>
#include <functional>

namespace amodal {

OcclusionMatrix::OcclusionMatrix(std::vector<int> ids, OrderEntries entries)
    : ids_(std::move(ids)), entries_(std::move(entries)) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (entries_.rows() != n || entries_.cols() != n)
    throw DimensionMismatch("occlusion matrix must be " + std::to_string(n) +
                            "x" + std::to_string(n));
  if ((entries_.array() < -1).any() || (entries_.array() > 1).any())
    throw InvariantViolation("occlusion entries must lie in {-1, 0, 1}");
  std::vector<int> sorted = ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvariantViolation("occlusion matrix ids must be distinct");
}

OcclusionMatrix OcclusionMatrix::zeros(std::vector<int> ids) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  return OcclusionMatrix(std::move(ids), OrderEntries::Zero(n, n));
}

bool OcclusionMatrix::contains(int id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

int OcclusionMatrix::index_of(int id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end())
    throw NotFound("id " + std::to_string(id) + " not in occlusion matrix");
  return static_cast<int>(it - ids_.begin());
}

int OcclusionMatrix::at(int row_id, int col_id) const {
  return entries_(index_of(row_id), index_of(col_id));
}

void OcclusionMatrix::set_pair(int i, int j, int value) {
  entries_(i, j) = value;
  entries_(j, i) = -value;
}

std::vector<int> OcclusionMatrix::row(int id) const {
  const int i = index_of(id);
  std::vector<int> out(ids_.size());
  for (int j = 0; j < size(); ++j) out[j] = entries_(i, j);
  return out;
}

namespace {

std::string join_cycle(const std::vector<int>& ids) {
  std::string s;
  for (int id : ids) s += std::to_string(id) + " -> ";
  return ids.empty() ? s : s + std::to_string(ids.front());
}

// Finds one cycle of the "occludes" relation among the `active` indices.
// Returned as indices in occluder-to-occludee order; the last vertex occludes
// the first. Empty when acyclic.
std::vector<int> find_cycle(const OrderEntries& w,
                            const std::vector<bool>& active) {
  const int n = static_cast<int>(w.rows());
  enum Color { kWhite, kGrey, kBlack };
  std::vector<Color> color(n, kWhite);
  std::vector<int> stack;
  std::vector<int> cycle;

  std::function<bool(int)> visit = [&](int u) {
    color[u] = kGrey;
    stack.push_back(u);
    for (int v = 0; v < n; ++v) {
      if (v == u || !active[v] || !occluded_by(w, v, u)) continue;
      if (color[v] == kGrey) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[v] == kWhite && visit(v)) return true;
    }
    stack.pop_back();
    color[u] = kBlack;
    return false;
  };

  for (int s = 0; s < n; ++s)
    if (active[s] && color[s] == kWhite && visit(s)) break;
  return cycle;
}

}  // namespace

CycleError::CycleError(std::vector<int> witness)
    : InvalidInput("occlusion cycle: " + join_cycle(witness)),
      witness_(std::move(witness)) {}

std::map<int, int> binary_labels(const OcclusionMatrix& w) {
  std::map<int, int> labels;
  const auto& e = w.entries();
  for (int i = 0; i < w.size(); ++i) {
    int indegree = 0;
    for (int j = 0; j < w.size(); ++j)
      if (j != i && occluded_by(e, i, j)) ++indegree;
    labels[w.ids()[i]] = indegree == 0 ? 0 : 1;
  }
  return labels;
}

OcclusionMatrix peel(const OcclusionMatrix& w, const std::set<int>& removed) {
  for (int id : removed) w.index_of(id);
  std::vector<int> keep_idx;
  std::vector<int> keep_ids;
  for (int i = 0; i < w.size(); ++i)
    if (!removed.count(w.ids()[i])) {
      keep_idx.push_back(i);
      keep_ids.push_back(w.ids()[i]);
    }
  const auto n = static_cast<Eigen::Index>(keep_idx.size());
  OrderEntries sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      sub(a, b) = w.entries()(keep_idx[a], keep_idx[b]);
  return OcclusionMatrix(std::move(keep_ids), std::move(sub));
}

LayerOrderAssignment absolute_order(const OcclusionMatrix& w) {
  const int n = w.size();
  const auto& e = w.entries();
  std::vector<bool> active(n, true);
  LayerOrderAssignment order;
  int remaining = n;
  for (int layer = 0; remaining > 0; ++layer) {
    std::vector<int> front;
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      bool occluded = false;
      for (int j = 0; j < n && !occluded; ++j)
        occluded = j != i && active[j] && occluded_by(e, i, j);
      if (!occluded) front.push_back(i);
    }
    if (front.empty()) {
      std::vector<int> witness;
      for (int idx : find_cycle(e, active)) witness.push_back(w.ids()[idx]);
      throw CycleError(std::move(witness));
    }
    for (int i : front) {
      order[w.ids()[i]] = layer;
      active[i] = false;
      --remaining;
    }
  }
  return order;
}

OcclusionMatrix pairwise_from_trace(const std::map<int, Mask>& amodal_masks,
                                    const std::map<int, RemovalKey>& removal,
                                    long overlap_threshold) {
  std::vector<int> ids;
  for (const auto& [id, mask] : amodal_masks) {
    if (!removal.count(id))
      throw InvalidInput("instance " + std::to_string(id) +
                         " has no removal step");
    ids.push_back(id);
  }
  OcclusionMatrix w = OcclusionMatrix::zeros(ids);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    const Mask& ma = amodal_masks.at(ids[a]);
    const RemovalKey ka = removal.at(ids[a]);
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      const Mask& mb = amodal_masks.at(ids[b]);
      if (overlap_area(ma, mb) < overlap_threshold) continue;
      const RemovalKey kb = removal.at(ids[b]);
      // ids are ascending, so a tie leaves the lower id in front.
      const bool a_first = ka <= kb;
      w.set_pair(static_cast<int>(a), static_cast<int>(b), a_first ? 1 : -1);
    }
  }
  return w;
}

OcclusionMatrix pairwise_from_trace(const std::map<int, Mask>& amodal_masks,
                                    const std::map<int, int>& step_of,
                                    long overlap_threshold) {
  std::map<int, RemovalKey> removal;
  for (const auto& [id, step] : step_of) removal[id] = {step, 0};
  return pairwise_from_trace(amodal_masks, removal, overlap_threshold);
}

std::size_t ValidationReport::count(Violation::Kind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [kind](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate(const OcclusionMatrix& w) {
  ValidationReport report;
  const auto& e = w.entries();
  const auto& ids = w.ids();
  for (int i = 0; i < w.size(); ++i)
    if (e(i, i) != 0)
      report.violations.push_back(
          {Violation::Kind::kDiagonal,
           {ids[i]},
           "nonzero diagonal at " + std::to_string(ids[i])});
  for (int i = 0; i < w.size(); ++i)
    for (int j = i + 1; j < w.size(); ++j)
      if (e(i, j) != -e(j, i))
        report.violations.push_back(
            {Violation::Kind::kAntisymmetry,
             {ids[i], ids[j]},
             "entries (" + std::to_string(ids[i]) + "," +
                 std::to_string(ids[j]) + ")=" + std::to_string(e(i, j)) +
                 " and (" + std::to_string(ids[j]) + "," +
                 std::to_string(ids[i]) + ")=" + std::to_string(e(j, i))});
  std::vector<bool> active(w.size(), true);
  const auto cycle = find_cycle(e, active);
  if (!cycle.empty()) {
    std::vector<int> witness;
    for (int idx : cycle) witness.push_back(ids[idx]);
    report.violations.push_back({Violation::Kind::kCycle, witness,
                                 "cycle " + join_cycle(witness)});
  }
  return report;
}

}  // namespace amodal
