#ifndef GRIDKIT_BBOXSET_HPP
#define GRIDKIT_BBOXSET_HPP

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridkit/lattice.hpp"

namespace gridkit {

enum class SetOp { union_, intersection, difference, symmetric_difference };

const char* to_string(SetOp op);

namespace detail {

/**
 * One level of a dimensionally recursive derivative tree.
 *
 * A d-dimensional tree maps sweep coordinates along dimension d-1 to
 * the (d-1)-dimensional discrete derivative of the set at that
 * coordinate: the slice of the set toggles (by symmetric difference)
 * at every stored key. At d = 0 the set is a single boolean.
 *
 * Invariants: no stored child is empty; the xor of all children is
 * empty (every slice returns to the empty set after the last key).
 */
struct DerivTree {
  bool value = false;
  std::map<Coord, DerivTree> slices;

  friend bool operator==(const DerivTree&, const DerivTree&) = default;
};

} // namespace detail

/**
 * A set of points on a strided integer lattice, stored as nested
 * discrete derivatives.
 *
 * All points lie on one sub-lattice: point p is admissible iff
 * p_i == anchor_i (mod stride_i). Values are immutable; every operation
 * returns a new set.
 */
class BBoxSet {
public:
  BBoxSet() = default;
  /// Empty set on the unit lattice.
  explicit BBoxSet(int dim);
  /// Empty set on a given sub-lattice.
  BBoxSet(int dim, Stride stride, Point anchor);
  explicit BBoxSet(const BBox& box);

  /// Union of the boxes; overlapping inputs are allowed.
  static BBoxSet from_bboxes(int dim, std::span<const BBox> boxes);

  int dim() const { return dim_; }
  const Stride& stride() const { return stride_; }
  const Point& anchor() const { return anchor_; }
  bool is_empty() const;

  /// Raw derivative tree; exposed for tests and diagnostics.
  const detail::DerivTree& tree() const { return tree_; }

private:
  friend BBoxSet apply_binary(SetOp, const BBoxSet&, const BBoxSet&);
  friend BBoxSet symmetric_difference(const BBoxSet&, const BBoxSet&);
  friend BBoxSet shift(const BBoxSet&, const Point&);
  friend BBoxSet refine(const BBoxSet&, const Stride&);
  friend BBoxSet expand(const BBoxSet&, const Point&, const Point&);
  friend BBoxSet coarsen(const BBoxSet&, const Stride&);

  BBoxSet(int dim, Stride stride, Point anchor, detail::DerivTree tree);

  int dim_ = 0;
  Stride stride_;
  Point anchor_;
  detail::DerivTree tree_;
};

/// True iff both sets may be combined (same dimension; same stride and
/// congruent anchors unless one side is empty).
bool compatible(const BBoxSet& a, const BBoxSet& b);

/// Evaluate R op S with the sweep over merged derivative keys.
BBoxSet apply_binary(SetOp op, const BBoxSet& r, const BBoxSet& s);

/// R xor S by direct merge of the derivative trees (no sweep).
BBoxSet symmetric_difference(const BBoxSet& r, const BBoxSet& s);

inline BBoxSet set_union(const BBoxSet& r, const BBoxSet& s) { return apply_binary(SetOp::union_, r, s); }
inline BBoxSet set_intersection(const BBoxSet& r, const BBoxSet& s) {
  return apply_binary(SetOp::intersection, r, s);
}
inline BBoxSet set_difference(const BBoxSet& r, const BBoxSet& s) {
  return apply_binary(SetOp::difference, r, s);
}

inline BBoxSet operator|(const BBoxSet& r, const BBoxSet& s) { return set_union(r, s); }
inline BBoxSet operator&(const BBoxSet& r, const BBoxSet& s) { return set_intersection(r, s); }
inline BBoxSet operator-(const BBoxSet& r, const BBoxSet& s) { return set_difference(r, s); }
inline BBoxSet operator^(const BBoxSet& r, const BBoxSet& s) { return symmetric_difference(r, s); }

/// Translate every point by v (lattice units). The anchor moves with the set.
BBoxSet shift(const BBoxSet& r, const Point& v);

/// Dilate by a stride-aligned rectangle: lo/hi stride steps per side, both non-negative.
BBoxSet expand(const BBoxSet& r, const Point& lo, const Point& hi);

/// Keep the points congruent to the anchor modulo stride * factor.
BBoxSet coarsen(const BBoxSet& r, const Stride& factor);

/// Move to the lattice with stride / factor; each point p becomes the
/// block p + [0, stride - stride/factor]. The derivative keys are unchanged.
BBoxSet refine(const BBoxSet& r, const Stride& factor);

/// hull \ R; hull must live on R's sub-lattice.
BBoxSet complement_within(const BBoxSet& r, const BBox& hull);

/// Canonical list of disjoint boxes, sorted by (lower, upper).
std::vector<BBox> to_bboxes(const BBoxSet& r);

bool contains(const BBoxSet& r, const Point& p);
Coord point_count(const BBoxSet& r);
bool equals(const BBoxSet& r, const BBoxSet& s);
inline bool operator==(const BBoxSet& r, const BBoxSet& s) { return equals(r, s); }

/// Number of points in the full derivative (the dimension-0 leaves).
Coord derivative_element_count(const BBoxSet& r);

/// Locations of the full derivative's points, sorted.
std::vector<Point> derivative_points(const BBoxSet& r);

// One canonical box per line; an empty set is written as "(empty/d)".
std::string to_string(const BBoxSet& r);
BBoxSet parse_bboxset(std::string_view text);
std::ostream& operator<<(std::ostream& os, const BBoxSet& r);

} // namespace gridkit

#endif // GRIDKIT_BBOXSET_HPP
