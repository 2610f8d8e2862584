#include "gridkit/bboxset.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace gridkit {

using detail::DerivTree;

const char* to_string(SetOp op) {
  switch (op) {
  case SetOp::union_: return "union";
  case SetOp::intersection: return "intersection";
  case SetOp::difference: return "difference";
  case SetOp::symmetric_difference: return "symmetric_difference";
  }
  return "?";
}

namespace {

// ------------------------------------------------------------ tree kernels
//
// All kernels take the tree's dimension explicitly; the tree itself does
// not know it.

bool tree_empty(const DerivTree& t, int d) { return d == 0 ? !t.value : t.slices.empty(); }

bool apply_bool(SetOp op, bool r, bool s) {
  switch (op) {
  case SetOp::union_: return r || s;
  case SetOp::intersection: return r && s;
  case SetOp::difference: return r && !s;
  case SetOp::symmetric_difference: return r != s;
  }
  return false;
}

// acc := acc xor t
void xor_into(DerivTree& acc, const DerivTree& t, int d) {
  if (d == 0) {
    acc.value = acc.value != t.value;
    return;
  }
  for (const auto& [key, child] : t.slices) {
    auto hint = acc.slices.lower_bound(key);
    if (hint == acc.slices.end() || hint->first != key) {
      acc.slices.emplace_hint(hint, key, child);
      continue;
    }
    xor_into(hint->second, child, d - 1);
    if (tree_empty(hint->second, d - 1)) acc.slices.erase(hint);
  }
}

DerivTree xor_merge(const DerivTree& a, const DerivTree& b, int d) {
  if (d > 0 && a.slices.size() < b.slices.size()) return xor_merge(b, a, d);
  DerivTree r = a;
  xor_into(r, b, d);
  return r;
}

/// Sweep along dimension d-1, maintaining the running slices of both
/// operands and of the result.
DerivTree sweep(SetOp op, const DerivTree& r, const DerivTree& s, int d) {
  if (d == 0) return DerivTree{apply_bool(op, r.value, s.value), {}};

  const bool r_empty = r.slices.empty();
  const bool s_empty = s.slices.empty();
  if (r_empty || s_empty) {
    switch (op) {
    case SetOp::union_:
    case SetOp::symmetric_difference: return r_empty ? s : r;
    case SetOp::intersection: return DerivTree{};
    case SetOp::difference: return r_empty ? DerivTree{} : r;
    }
  }

  DerivTree result;
  DerivTree r_slice, s_slice, t_slice;
  auto ri = r.slices.begin();
  auto si = s.slices.begin();
  while (ri != r.slices.end() || si != s.slices.end()) {
    Coord n;
    if (si == s.slices.end() || (ri != r.slices.end() && ri->first < si->first)) {
      n = ri->first;
    } else {
      n = si->first;
    }
    if (ri != r.slices.end() && ri->first == n) {
      xor_into(r_slice, ri->second, d - 1);
      ++ri;
    }
    if (si != s.slices.end() && si->first == n) {
      xor_into(s_slice, si->second, d - 1);
      ++si;
    }
    DerivTree t_next = sweep(op, r_slice, s_slice, d - 1);
    // t_slice becomes the derivative at n
    xor_into(t_slice, t_next, d - 1);
    if (!tree_empty(t_slice, d - 1)) result.slices.emplace_hint(result.slices.end(), n, std::move(t_slice));
    t_slice = std::move(t_next);
  }
  return result;
}

DerivTree box_tree(const BBox& b, int d) {
  if (d == 0) return DerivTree{true, {}};
  DerivTree child = box_tree(b, d - 1);
  const int axis = d - 1;
  DerivTree t;
  t.slices.emplace(b.lower()[axis], child);
  t.slices.emplace(b.upper()[axis] + b.stride()[axis], std::move(child));
  return t;
}

bool tree_contains(const DerivTree& t, const Point& p, int d) {
  if (d == 0) return t.value;
  bool inside = false;
  const Coord x = p[d - 1];
  for (auto it = t.slices.begin(); it != t.slices.end() && it->first <= x; ++it) {
    inside = inside != tree_contains(it->second, p, d - 1);
  }
  return inside;
}

DerivTree tree_shift(const DerivTree& t, const Point& v, int d) {
  if (d == 0) return t;
  DerivTree r;
  for (const auto& [key, child] : t.slices) {
    r.slices.emplace_hint(r.slices.end(), key + v[d - 1], tree_shift(child, v, d - 1));
  }
  return r;
}

Coord tree_leaf_count(const DerivTree& t, int d) {
  if (d == 0) return t.value ? 1 : 0;
  Coord n = 0;
  for (const auto& kv : t.slices) n += tree_leaf_count(kv.second, d - 1);
  return n;
}

void tree_leaves(const DerivTree& t, int d, Point& at, std::vector<Point>& out) {
  if (d == 0) {
    if (t.value) out.push_back(at);
    return;
  }
  for (const auto& [key, child] : t.slices) {
    at[d - 1] = key;
    tree_leaves(child, d - 1, at, out);
  }
}

// ------------------------------------------------------------ normalization

/// A box restricted to its first few dimensions; unused components stay 0.
struct Span {
  std::array<Coord, max_dim> lo{};
  std::array<Coord, max_dim> hi{};
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// Canonical disjoint spans of a d-dimensional tree, sorted.
std::vector<Span> tree_spans(const DerivTree& t, int d, const Stride& stride) {
  if (d == 0) return t.value ? std::vector<Span>{Span{}} : std::vector<Span>{};
  const int axis = d - 1;
  const auto ax = static_cast<std::size_t>(axis);
  const Coord step = stride[axis];

  std::vector<Span> out;
  std::vector<std::pair<Span, Coord>> open; // slice span -> start coordinate, sorted
  std::vector<std::pair<Span, Coord>> still_open;
  DerivTree slice;
  for (const auto& [key, child] : t.slices) {
    xor_into(slice, child, d - 1);
    const std::vector<Span> next = tree_spans(slice, d - 1, stride);

    still_open.clear();
    auto oi = open.begin();
    auto ni = next.begin();
    while (oi != open.end() || ni != next.end()) {
      if (ni == next.end() || (oi != open.end() && oi->first < *ni)) {
        Span done = oi->first;
        done.lo[ax] = oi->second;
        done.hi[ax] = key - step;
        out.push_back(done);
        ++oi;
      } else if (oi == open.end() || *ni < oi->first) {
        still_open.emplace_back(*ni, key);
        ++ni;
      } else {
        still_open.push_back(*oi);
        ++oi;
        ++ni;
      }
    }
    std::swap(open, still_open);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void require_compatible(const BBoxSet& a, const BBoxSet& b, const char* what) {
  detail::require_same_dim(a.dim(), b.dim(), what);
  if (!compatible(a, b)) throw UsageError(std::string(what) + ": operands live on different sub-lattices");
}

Point normalized_anchor(const Point& lower, const Stride& stride) {
  Point a(lower.dim());
  for (int i = 0; i < lower.dim(); ++i) a[i] = floor_mod(lower[i], stride[i]);
  return a;
}

} // namespace

// ------------------------------------------------------------ BBoxSet

BBoxSet::BBoxSet(int dim) : BBoxSet(dim, Stride::ones(dim), Point(dim)) {}

BBoxSet::BBoxSet(int dim, Stride stride, Point anchor)
    : dim_(dim), stride_(stride), anchor_(anchor) {
  detail::require_same_dim(dim, stride.dim(), "BBoxSet");
  detail::require_same_dim(dim, anchor.dim(), "BBoxSet");
}

BBoxSet::BBoxSet(int dim, Stride stride, Point anchor, DerivTree tree)
    : dim_(dim), stride_(stride), anchor_(anchor), tree_(std::move(tree)) {}

BBoxSet::BBoxSet(const BBox& box) : BBoxSet(box.dim()) {
  if (box.is_empty()) return;
  stride_ = box.stride();
  anchor_ = normalized_anchor(box.lower(), stride_);
  tree_ = box_tree(box, dim_);
}

bool BBoxSet::is_empty() const { return tree_empty(tree_, dim_); }

BBoxSet BBoxSet::from_bboxes(int dim, std::span<const BBox> boxes) {
  BBoxSet lattice(dim);
  const BBox* first = nullptr;
  for (const BBox& b : boxes) {
    detail::require_same_dim(dim, b.dim(), "from_bboxes");
    if (b.is_empty()) continue;
    if (first == nullptr) {
      first = &b;
      lattice = BBoxSet(b);
    } else if (!same_sublattice(*first, b)) {
      throw UsageError("from_bboxes: boxes live on different sub-lattices");
    }
  }
  if (first == nullptr) return lattice;

  std::vector<DerivTree> level;
  level.reserve(boxes.size());
  for (const BBox& b : boxes) {
    if (!b.is_empty()) level.push_back(box_tree(b, dim));
  }
  // balanced pairwise reduction keeps the total work near n log n
  while (level.size() > 1) {
    std::vector<DerivTree> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(sweep(SetOp::union_, level[i], level[i + 1], dim));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return BBoxSet(dim, lattice.stride_, lattice.anchor_, std::move(level.front()));
}

bool compatible(const BBoxSet& a, const BBoxSet& b) {
  if (a.dim() != b.dim()) return false;
  if (a.is_empty() || b.is_empty()) return true;
  if (a.stride() != b.stride()) return false;
  for (int i = 0; i < a.dim(); ++i) {
    if (floor_mod(a.anchor()[i] - b.anchor()[i], a.stride()[i]) != 0) return false;
  }
  return true;
}

BBoxSet apply_binary(SetOp op, const BBoxSet& r, const BBoxSet& s) {
  require_compatible(r, s, "apply_binary");
  const BBoxSet& lattice = (r.is_empty() && !s.is_empty()) ? s : r;
  return BBoxSet(r.dim_, lattice.stride_, lattice.anchor_, sweep(op, r.tree_, s.tree_, r.dim_));
}

BBoxSet symmetric_difference(const BBoxSet& r, const BBoxSet& s) {
  require_compatible(r, s, "symmetric_difference");
  const BBoxSet& lattice = (r.is_empty() && !s.is_empty()) ? s : r;
  return BBoxSet(r.dim_, lattice.stride_, lattice.anchor_, xor_merge(r.tree_, s.tree_, r.dim_));
}

BBoxSet shift(const BBoxSet& r, const Point& v) {
  detail::require_same_dim(r.dim(), v.dim(), "shift");
  return BBoxSet(r.dim_, r.stride_, r.anchor_ + v, tree_shift(r.tree_, v, r.dim_));
}

BBoxSet expand(const BBoxSet& r, const Point& lo, const Point& hi) {
  detail::require_same_dim(r.dim(), lo.dim(), "expand");
  detail::require_same_dim(r.dim(), hi.dim(), "expand");
  for (int i = 0; i < r.dim(); ++i) {
    if (lo[i] < 0 || hi[i] < 0) throw UsageError("expand: growth counts must be non-negative");
  }
  if (r.is_empty()) return r;
  std::vector<BBox> boxes = to_bboxes(r);
  for (BBox& b : boxes) b = bbox_expand(b, lo, hi);
  BBoxSet out = BBoxSet::from_bboxes(r.dim(), boxes);
  return BBoxSet(r.dim_, r.stride_, r.anchor_, std::move(out.tree_));
}

BBoxSet coarsen(const BBoxSet& r, const Stride& factor) {
  detail::require_same_dim(r.dim(), factor.dim(), "coarsen");
  const Stride coarse(r.stride().steps() * factor.steps());
  BBoxSet result(r.dim(), coarse, r.anchor());
  std::vector<BBox> kept;
  for (const BBox& b : to_bboxes(r)) {
    Point lo(r.dim()), hi(r.dim());
    bool empty = false;
    for (int i = 0; i < r.dim(); ++i) {
      const Coord step = coarse[i];
      lo[i] = b.lower()[i] + floor_mod(r.anchor()[i] - b.lower()[i], step);
      hi[i] = b.upper()[i] - floor_mod(b.upper()[i] - r.anchor()[i], step);
      empty = empty || lo[i] > hi[i];
    }
    if (!empty) kept.emplace_back(lo, hi, coarse);
  }
  if (kept.empty()) return result;
  result.tree_ = BBoxSet::from_bboxes(r.dim(), kept).tree_;
  return result;
}

BBoxSet refine(const BBoxSet& r, const Stride& factor) {
  detail::require_same_dim(r.dim(), factor.dim(), "refine");
  Point fine(r.dim());
  for (int i = 0; i < r.dim(); ++i) {
    if (r.stride()[i] % factor[i] != 0) throw UsageError("refine: factor does not divide the stride");
    fine[i] = r.stride()[i] / factor[i];
  }
  return BBoxSet(r.dim_, Stride(fine), r.anchor_, r.tree_);
}

BBoxSet complement_within(const BBoxSet& r, const BBox& hull) {
  detail::require_same_dim(r.dim(), hull.dim(), "complement_within");
  return set_difference(BBoxSet(hull), r);
}

std::vector<BBox> to_bboxes(const BBoxSet& r) {
  std::vector<BBox> out;
  const int d = r.dim();
  for (const Span& s : tree_spans(r.tree(), d, r.stride())) {
    Point lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = s.lo[static_cast<std::size_t>(i)];
      hi[i] = s.hi[static_cast<std::size_t>(i)];
    }
    out.emplace_back(lo, hi, r.stride());
  }
  return out;
}

bool contains(const BBoxSet& r, const Point& p) {
  detail::require_same_dim(r.dim(), p.dim(), "contains");
  if (r.is_empty()) return false;
  for (int i = 0; i < r.dim(); ++i) {
    if (floor_mod(p[i] - r.anchor()[i], r.stride()[i]) != 0) return false;
  }
  return tree_contains(r.tree(), p, r.dim());
}

Coord point_count(const BBoxSet& r) {
  Coord n = 0;
  for (const BBox& b : to_bboxes(r)) n = detail::checked_add(n, bbox_point_count(b));
  return n;
}

bool equals(const BBoxSet& r, const BBoxSet& s) { return symmetric_difference(r, s).is_empty(); }

Coord derivative_element_count(const BBoxSet& r) { return tree_leaf_count(r.tree(), r.dim()); }

std::vector<Point> derivative_points(const BBoxSet& r) {
  std::vector<Point> out;
  if (r.dim() == 0) return out;
  Point at(r.dim());
  tree_leaves(r.tree(), r.dim(), at, out);
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------ text I/O

std::ostream& operator<<(std::ostream& os, const BBoxSet& r) {
  if (r.is_empty()) return os << BBox::empty(r.dim()) << '\n';
  for (const BBox& b : to_bboxes(r)) os << b << '\n';
  return os;
}

std::string to_string(const BBoxSet& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

BBoxSet parse_bboxset(std::string_view text) {
  std::vector<BBox> boxes;
  int dim = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    BBox b = parse_bbox(line);
    if (dim == 0) dim = b.dim();
    detail::require_same_dim(dim, b.dim(), "parse_bboxset");
    boxes.push_back(b);
  }
  if (dim == 0) throw UsageError("parse_bboxset: no boxes (an empty set is written as (empty/d))");
  return BBoxSet::from_bboxes(dim, boxes);
}

} // namespace gridkit
