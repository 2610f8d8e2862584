#include "gridkit/boxlist.hpp"

namespace gridkit {

std::vector<BBox> bbox_difference(const BBox& a, const BBox& b) {
  const BBox overlap = bbox_intersect(a, b);
  if (overlap.is_empty()) return {a};
  std::vector<BBox> out;
  // peel slabs off a, one dimension at a time
  Point lo = a.lower();
  Point hi = a.upper();
  const Stride& s = a.stride();
  for (int i = 0; i < a.dim(); ++i) {
    if (lo[i] < overlap.lower()[i]) {
      Point slab_hi = hi;
      slab_hi[i] = overlap.lower()[i] - s[i];
      out.emplace_back(lo, slab_hi, s);
      lo[i] = overlap.lower()[i];
    }
    if (hi[i] > overlap.upper()[i]) {
      Point slab_lo = lo;
      slab_lo[i] = overlap.upper()[i] + s[i];
      out.emplace_back(slab_lo, hi, s);
      hi[i] = overlap.upper()[i];
    }
  }
  return out;
}

void NaiveBoxList::insert(const BBox& b) {
  detail::require_same_dim(dim_, b.dim(), "NaiveBoxList::insert");
  std::vector<BBox> pieces{b};
  for (const BBox& existing : boxes_) {
    std::vector<BBox> next;
    for (const BBox& p : pieces) {
      for (BBox& q : bbox_difference(p, existing)) next.push_back(q);
    }
    pieces = std::move(next);
    if (pieces.empty()) return;
  }
  for (BBox& p : pieces) {
    if (!p.is_empty()) boxes_.push_back(p);
  }
}

Coord NaiveBoxList::point_count() const {
  Coord n = 0;
  for (const BBox& b : boxes_) n = detail::checked_add(n, bbox_point_count(b));
  return n;
}

NaiveBoxList naive_union(int dim, std::span<const BBox> boxes) {
  NaiveBoxList list(dim);
  for (const BBox& b : boxes) list.insert(b);
  return list;
}

} // namespace gridkit
