#ifndef GRIDKIT_BOXLIST_HPP
#define GRIDKIT_BOXLIST_HPP

// List-of-disjoint-boxes set, the quadratic baseline the derivative
// tree is benchmarked against. Not used by the library itself.

#include <span>
#include <vector>

#include "gridkit/lattice.hpp"

namespace gridkit {

/// a \ b as at most 2*dim disjoint boxes.
std::vector<BBox> bbox_difference(const BBox& a, const BBox& b);

class NaiveBoxList {
public:
  explicit NaiveBoxList(int dim) : dim_(dim) {}

  /// Adds the parts of b not yet covered; O(size()) per call.
  void insert(const BBox& b);

  const std::vector<BBox>& boxes() const { return boxes_; }
  Coord point_count() const;

private:
  int dim_;
  std::vector<BBox> boxes_;
};

NaiveBoxList naive_union(int dim, std::span<const BBox> boxes);

} // namespace gridkit

#endif // GRIDKIT_BOXLIST_HPP
