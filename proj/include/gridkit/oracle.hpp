#ifndef GRIDKIT_ORACLE_HPP
#define GRIDKIT_ORACLE_HPP

// Brute-force point-set ground truth. Shares nothing with the derivative
// tree algebra except the BBox membership rules.

#include <cstddef>
#include <span>
#include <vector>

#include "gridkit/bboxset.hpp"
#include "gridkit/lattice.hpp"

namespace gridkit::oracle {

inline constexpr std::size_t default_point_cap = 1'000'000;

/// Explicit, sorted, duplicate-free list of lattice points.
class PointSet {
public:
  PointSet() = default;
  /// Empty set on the unit lattice.
  explicit PointSet(int dim) : PointSet(dim, Stride::ones(dim), Point(dim)) {}
  PointSet(int dim, Stride stride, Point offset);

  /// Sorts and deduplicates; every point must be congruent to offset mod stride.
  static PointSet from_points(int dim, Stride stride, Point offset, std::vector<Point> points);
  /// Enumerates every box (boxes may overlap).
  static PointSet from_boxes(int dim, std::span<const BBox> boxes,
                             std::size_t cap = default_point_cap);

  int dim() const { return dim_; }
  const Stride& stride() const { return stride_; }
  const Point& offset() const { return offset_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool contains(const Point& p) const;

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.points_ == b.points_; }

private:
  int dim_ = 0;
  Stride stride_;
  Point offset_;
  std::vector<Point> points_;
};

/// Calls f(point) for every point of b, lexicographic in the last dimension first.
template <class F>
void for_each_point(const BBox& b, F&& f) {
  if (b.is_empty()) return;
  Point p = b.lower();
  const int d = b.dim();
  while (true) {
    f(static_cast<const Point&>(p));
    int i = 0;
    for (; i < d; ++i) {
      p[i] += b.stride()[i];
      if (p[i] <= b.upper()[i]) break;
      p[i] = b.lower()[i];
    }
    if (i == d) return;
  }
}

PointSet oracle_op(SetOp op, const PointSet& a, const PointSet& b);
PointSet translate(const PointSet& a, const Point& v);
/// Union of per-point dilations by lo/hi stride steps.
PointSet dilate(const PointSet& a, const Point& lo, const Point& hi);
PointSet coarsen(const PointSet& a, const Stride& factor);
PointSet refine(const PointSet& a, const Stride& factor);
/// Full discrete derivative: fold A := A xor translate(A, +stride_i e^i) over all i.
PointSet derivative(const PointSet& a);

PointSet oracle_from_bboxset(const BBoxSet& r, std::size_t cap = default_point_cap);
BBoxSet oracle_to_bboxset(const PointSet& a, std::size_t cap = default_point_cap);

} // namespace gridkit::oracle

#endif // GRIDKIT_ORACLE_HPP
