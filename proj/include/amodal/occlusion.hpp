#pragma once

#include <Eigen/Core>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "amodal/error.hpp"
#include "amodal/raster.hpp"

namespace amodal {

using OrderEntries = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

// Pairwise occlusion order over a list of instance ids. Entry (i, j) is 1 when
// instance i occludes j, -1 when i is occluded by j and 0 when the two do not
// overlap. Rows and columns follow ids() order.
class OcclusionMatrix {
 public:
  OcclusionMatrix() = default;
  // Entries must be square, match ids in size and lie in {-1, 0, 1}. Ids must
  // be distinct. Diagonal and antisymmetry are left to validate().
  OcclusionMatrix(std::vector<int> ids, OrderEntries entries);
  static OcclusionMatrix zeros(std::vector<int> ids);

  const std::vector<int>& ids() const { return ids_; }
  int size() const { return static_cast<int>(ids_.size()); }
  const OrderEntries& entries() const { return entries_; }

  bool contains(int id) const;
  int index_of(int id) const;
  int at(int row_id, int col_id) const;

  // Sets (i, j) = value and (j, i) = -value, by row/column index.
  void set_pair(int i, int j, int value);

  // The full pairwise row of `id`, aligned with ids().
  std::vector<int> row(int id) const;

  friend bool operator==(const OcclusionMatrix& a, const OcclusionMatrix& b) {
    return a.ids_ == b.ids_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<int> ids_;
  OrderEntries entries_;
};

using LayerOrderAssignment = std::map<int, int>;

// Raised by absolute_order when the occlusion relation is cyclic.
class CycleError : public InvalidInput {
 public:
  explicit CycleError(std::vector<int> witness);
  const std::vector<int>& witness() const { return witness_; }

 private:
  std::vector<int> witness_;
};

// True when column j occludes row i, read from either half of the matrix.
inline bool occluded_by(const OrderEntries& w, int i, int j) {
  return w(i, j) == -1 || w(j, i) == 1;
}

// 0 for instances with no occluder (indegree 0), 1 otherwise.
std::map<int, int> binary_labels(const OcclusionMatrix& w);

// Submatrix over the ids not in `removed`.
OcclusionMatrix peel(const OcclusionMatrix& w, const std::set<int>& removed);

// 0 for unoccluded instances, otherwise 1 + the highest order among occluders.
// Throws CycleError.
LayerOrderAssignment absolute_order(const OcclusionMatrix& w);

// Removal priority of an instance: step index first, then rank within the step.
struct RemovalKey {
  int step = 0;
  int rank = 0;

  friend auto operator<=>(const RemovalKey&, const RemovalKey&) = default;
};

// Pairwise order implied by a removal schedule: overlapping pairs are ordered
// by removal key (earlier = in front), ties broken by lower id. Pairs whose
// overlap is below `overlap_threshold` pixels get 0. Output ids are sorted.
OcclusionMatrix pairwise_from_trace(const std::map<int, Mask>& amodal_masks,
                                    const std::map<int, RemovalKey>& removal,
                                    long overlap_threshold = 1);
// Convenience overload with a rank of 0 for every id.
OcclusionMatrix pairwise_from_trace(const std::map<int, Mask>& amodal_masks,
                                    const std::map<int, int>& step_of,
                                    long overlap_threshold = 1);

struct Violation {
  enum class Kind { kDiagonal, kAntisymmetry, kCycle };
  Kind kind;
  std::vector<int> ids;  // offending pair, or the cycle path
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(Violation::Kind kind) const;
};

ValidationReport validate(const OcclusionMatrix& w);

}  // namespace amodal
