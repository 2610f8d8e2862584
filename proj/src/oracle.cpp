#include "gridkit/oracle.hpp"

#include <algorithm>
#include <iterator>
#include <string>

namespace gridkit::oracle {

namespace {

void sort_unique(std::vector<Point>& pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw ResourceError("point set exceeds oracle cap of " + std::to_string(cap) + " points");
  }
}

bool congruent(const Point& p, const Point& offset, const Stride& stride) {
  for (int i = 0; i < p.dim(); ++i) {
    if (floor_mod(p[i] - offset[i], stride[i]) != 0) return false;
  }
  return true;
}

} // namespace

PointSet::PointSet(int dim, Stride stride, Point offset)
    : dim_(dim), stride_(stride), offset_(offset) {
  detail::require_same_dim(dim, stride.dim(), "PointSet");
  detail::require_same_dim(dim, offset.dim(), "PointSet");
}

PointSet PointSet::from_points(int dim, Stride stride, Point offset, std::vector<Point> points) {
  PointSet s(dim, stride, offset);
  for (const Point& p : points) {
    detail::require_same_dim(dim, p.dim(), "PointSet");
    if (!congruent(p, offset, stride)) throw UsageError("PointSet: point off the sub-lattice");
  }
  sort_unique(points);
  s.points_ = std::move(points);
  return s;
}

PointSet PointSet::from_boxes(int dim, std::span<const BBox> boxes, std::size_t cap) {
  PointSet s(dim);
  const BBox* first = nullptr;
  std::vector<Point> pts;
  for (const BBox& b : boxes) {
    detail::require_same_dim(dim, b.dim(), "PointSet::from_boxes");
    if (b.is_empty()) continue;
    if (first == nullptr) {
      first = &b;
      Point off(dim);
      for (int i = 0; i < dim; ++i) off[i] = floor_mod(b.lower()[i], b.stride()[i]);
      s = PointSet(dim, b.stride(), off);
    } else if (!same_sublattice(*first, b)) {
      throw UsageError("PointSet::from_boxes: boxes live on different sub-lattices");
    }
    for_each_point(b, [&](const Point& p) { pts.push_back(p); });
    check_cap(pts.size(), cap);
  }
  sort_unique(pts);
  s.points_ = std::move(pts);
  return s;
}

bool PointSet::contains(const Point& p) const {
  return std::binary_search(points_.begin(), points_.end(), p);
}

PointSet oracle_op(SetOp op, const PointSet& a, const PointSet& b) {
  detail::require_same_dim(a.dim(), b.dim(), "oracle_op");
  if (!a.empty() && !b.empty()) {
    if (a.stride() != b.stride() || !congruent(a.offset(), b.offset(), a.stride())) {
      throw UsageError("oracle_op: operands live on different sub-lattices");
    }
  }
  const PointSet& lattice = (a.empty() && !b.empty()) ? b : a;
  std::vector<Point> out;
  const auto& x = a.points();
  const auto& y = b.points();
  auto sink = std::back_inserter(out);
  switch (op) {
  case SetOp::union_: std::set_union(x.begin(), x.end(), y.begin(), y.end(), sink); break;
  case SetOp::intersection: std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), sink); break;
  case SetOp::difference: std::set_difference(x.begin(), x.end(), y.begin(), y.end(), sink); break;
  case SetOp::symmetric_difference:
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), sink);
    break;
  }
  return PointSet::from_points(a.dim(), lattice.stride(), lattice.offset(), std::move(out));
}

PointSet translate(const PointSet& a, const Point& v) {
  std::vector<Point> out;
  out.reserve(a.size());
  for (const Point& p : a.points()) out.push_back(p + v);
  return PointSet::from_points(a.dim(), a.stride(), a.offset() + v, std::move(out));
}

PointSet dilate(const PointSet& a, const Point& lo, const Point& hi) {
  // one dimension at a time; a rectangle is the product of its 1D extents
  std::vector<Point> cur = a.points();
  for (int i = 0; i < a.dim(); ++i) {
    std::vector<Point> next;
    next.reserve(cur.size() * static_cast<std::size_t>(lo[i] + hi[i] + 1));
    for (const Point& p : cur) {
      for (Coord k = -lo[i]; k <= hi[i]; ++k) {
        Point q = p;
        q[i] += k * a.stride()[i];
        next.push_back(q);
      }
    }
    sort_unique(next);
    cur = std::move(next);
  }
  return PointSet::from_points(a.dim(), a.stride(), a.offset(), std::move(cur));
}

PointSet coarsen(const PointSet& a, const Stride& factor) {
  const Stride coarse(a.stride().steps() * factor.steps());
  std::vector<Point> out;
  for (const Point& p : a.points()) {
    if (congruent(p, a.offset(), coarse)) out.push_back(p);
  }
  return PointSet::from_points(a.dim(), coarse, a.offset(), std::move(out));
}

PointSet refine(const PointSet& a, const Stride& factor) {
  Point fine(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    if (a.stride()[i] % factor[i] != 0) throw UsageError("refine: factor does not divide the stride");
    fine[i] = a.stride()[i] / factor[i];
  }
  std::vector<Point> out;
  for (const Point& p : a.points()) {
    const BBox block(p, p + fine * (factor.steps() - Point(a.dim(), 1)), Stride(fine));
    for_each_point(block, [&](const Point& q) { out.push_back(q); });
  }
  return PointSet::from_points(a.dim(), Stride(fine), a.offset(), std::move(out));
}

PointSet derivative(const PointSet& a) {
  PointSet cur = a;
  for (int i = 0; i < a.dim(); ++i) {
    const Point step = Point::unit(a.dim(), i) * a.stride()[i];
    cur = oracle_op(SetOp::symmetric_difference, cur, translate(cur, step));
  }
  return cur;
}

PointSet oracle_from_bboxset(const BBoxSet& r, std::size_t cap) {
  std::vector<Point> pts;
  for (const BBox& b : to_bboxes(r)) {
    for_each_point(b, [&](const Point& p) { pts.push_back(p); });
    check_cap(pts.size(), cap);
  }
  return PointSet::from_points(r.dim(), r.stride(), r.anchor(), std::move(pts));
}

BBoxSet oracle_to_bboxset(const PointSet& a, std::size_t cap) {
  check_cap(a.size(), cap);
  std::vector<BBox> unit;
  unit.reserve(a.size());
  for (const Point& p : a.points()) unit.emplace_back(p, p, a.stride());
  if (unit.empty()) return BBoxSet(a.dim(), a.stride(), a.offset());
  return BBoxSet::from_bboxes(a.dim(), unit);
}

} // namespace gridkit::oracle
