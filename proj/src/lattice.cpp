#include "gridkit/lattice.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

namespace gridkit {

namespace detail {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                     " vs " + std::to_string(b) + ")");
  }
}

Coord checked_mul(Coord a, Coord b) {
  Coord r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("lattice point count overflow");
  return r;
}

Coord checked_add(Coord a, Coord b) {
  Coord r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceError("lattice point count overflow");
  return r;
}

} // namespace detail

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > max_dim) {
    throw UsageError("dimension " + std::to_string(dim) + " outside [1, " +
                     std::to_string(max_dim) + "]");
  }
}

} // namespace

// ---------------------------------------------------------------- Point

Point::Point(int dim, Coord fill) : dim_(dim) {
  check_dim(dim);
  for (int i = 0; i < dim; ++i) (*this)[i] = fill;
}

Point::Point(std::initializer_list<Coord> coords) : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  int i = 0;
  for (Coord c : coords) (*this)[i++] = c;
}

Point Point::unit(int dim, int direction) {
  Point p(dim);
  if (direction < 0 || direction >= dim) throw UsageError("unit vector direction out of range");
  p[direction] = 1;
  return p;
}

Point Point::operator+(const Point& o) const {
  detail::require_same_dim(dim_, o.dim_, "Point +");
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] += o[i];
  return r;
}

Point Point::operator-(const Point& o) const {
  detail::require_same_dim(dim_, o.dim_, "Point -");
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] -= o[i];
  return r;
}

Point Point::operator-() const {
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] = -r[i];
  return r;
}

Point Point::operator*(const Point& o) const {
  detail::require_same_dim(dim_, o.dim_, "Point *");
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] *= o[i];
  return r;
}

Point Point::operator*(Coord s) const {
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] *= s;
  return r;
}

Coord Point::product() const {
  Coord r = 1;
  for (int i = 0; i < dim_; ++i) r = detail::checked_mul(r, (*this)[i]);
  return r;
}

std::ostream& operator<<(std::ostream& os, const Point& p) {
  os << '(';
  for (int i = 0; i < p.dim(); ++i) os << (i ? "," : "") << p[i];
  return os << ')';
}

// ---------------------------------------------------------------- Stride

Stride::Stride(Point steps) : steps_(steps) {
  for (int i = 0; i < steps_.dim(); ++i) {
    if (steps_[i] <= 0) throw UsageError("stride components must be strictly positive");
  }
}

// ---------------------------------------------------------------- BBox

BBox::BBox(Point lower, Point upper, Stride stride)
    : dim_(lower.dim()), lower_(lower), upper_(upper), stride_(stride) {
  detail::require_same_dim(lower.dim(), upper.dim(), "BBox");
  detail::require_same_dim(lower.dim(), stride.dim(), "BBox");
  empty_ = false;
  for (int i = 0; i < dim_; ++i) {
    if (lower[i] > upper[i]) {
      empty_ = true;
      continue;
    }
    if ((upper[i] - lower[i]) % stride[i] != 0) {
      throw UsageError("BBox extent is not a multiple of its stride");
    }
  }
  if (empty_) *this = BBox::empty(dim_);
}

BBox::BBox(Point lower, Point upper) : BBox(lower, upper, Stride::ones(lower.dim())) {}

BBox BBox::empty(int dim) {
  BBox b;
  b.dim_ = dim;
  b.empty_ = true;
  b.lower_ = Point(dim, 1);
  b.upper_ = Point(dim, 0);
  b.stride_ = Stride::ones(dim);
  return b;
}

bool operator==(const BBox& a, const BBox& b) {
  if (a.dim_ != b.dim_ || a.empty_ != b.empty_) return false;
  if (a.empty_) return true;
  return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.stride_ == b.stride_;
}

bool operator<(const BBox& a, const BBox& b) {
  if (a.empty_ != b.empty_) return a.empty_;
  if (a.empty_) return false;
  if (a.lower_ != b.lower_) return a.lower_ < b.lower_;
  if (a.upper_ != b.upper_) return a.upper_ < b.upper_;
  return a.stride_ < b.stride_;
}

bool bbox_contains(const BBox& b, const Point& p) {
  detail::require_same_dim(b.dim(), p.dim(), "bbox_contains");
  if (b.is_empty()) return false;
  for (int i = 0; i < b.dim(); ++i) {
    if (p[i] < b.lower()[i] || p[i] > b.upper()[i]) return false;
    if ((p[i] - b.lower()[i]) % b.stride()[i] != 0) return false;
  }
  return true;
}

bool same_sublattice(const BBox& a, const BBox& b) {
  if (a.dim() != b.dim()) return false;
  if (a.is_empty() || b.is_empty()) return true;
  if (a.stride() != b.stride()) return false;
  for (int i = 0; i < a.dim(); ++i) {
    if (floor_mod(a.lower()[i] - b.lower()[i], a.stride()[i]) != 0) return false;
  }
  return true;
}

BBox bbox_intersect(const BBox& a, const BBox& b) {
  detail::require_same_dim(a.dim(), b.dim(), "bbox_intersect");
  if (a.is_empty() || b.is_empty()) return BBox::empty(a.dim());
  if (!same_sublattice(a, b)) throw UsageError("bbox_intersect: boxes live on different sub-lattices");
  Point lo(a.dim()), hi(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lower()[i], b.lower()[i]);
    hi[i] = std::min(a.upper()[i], b.upper()[i]);
    if (lo[i] > hi[i]) return BBox::empty(a.dim());
  }
  return BBox(lo, hi, a.stride());
}

BBox bbox_shift(const BBox& b, const Point& v) {
  detail::require_same_dim(b.dim(), v.dim(), "bbox_shift");
  if (b.is_empty()) return b;
  return BBox(b.lower() + v, b.upper() + v, b.stride());
}

BBox bbox_expand(const BBox& b, const Point& lo, const Point& hi) {
  detail::require_same_dim(b.dim(), lo.dim(), "bbox_expand");
  detail::require_same_dim(b.dim(), hi.dim(), "bbox_expand");
  if (b.is_empty()) return b;
  const Point& s = b.stride().steps();
  return BBox(b.lower() - lo * s, b.upper() + hi * s, b.stride());
}

Coord bbox_point_count(const BBox& b) {
  if (b.is_empty()) return 0;
  Coord n = 1;
  for (int i = 0; i < b.dim(); ++i) {
    n = detail::checked_mul(n, (b.upper()[i] - b.lower()[i]) / b.stride()[i] + 1);
  }
  return n;
}

// ---------------------------------------------------------------- geometry

GridGeometry::GridGeometry(std::vector<double> o, std::vector<double> s)
    : origin(std::move(o)), spacing(std::move(s)) {
  if (origin.size() != spacing.size()) throw UsageError("GridGeometry: origin/spacing size mismatch");
  for (double h : spacing) {
    if (!(h > 0.0)) throw UsageError("GridGeometry: spacing must be strictly positive");
  }
}

std::vector<double> to_physical(const GridGeometry& g, const Point& p) {
  detail::require_same_dim(g.dim(), p.dim(), "to_physical");
  std::vector<double> x(g.origin.size());
  for (int i = 0; i < p.dim(); ++i) {
    x[static_cast<std::size_t>(i)] = g.origin[static_cast<std::size_t>(i)] +
                                     static_cast<double>(p[i]) * g.spacing[static_cast<std::size_t>(i)];
  }
  return x;
}

// ---------------------------------------------------------------- text I/O

std::string to_string(const BBox& b) {
  std::ostringstream os;
  os << b;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const BBox& b) {
  if (b.is_empty()) return os << "(empty/" << b.dim() << ')';
  os << '(';
  for (int i = 0; i < b.dim(); ++i) {
    os << (i ? "," : "") << '[' << b.lower()[i] << ':' << b.upper()[i] << ':' << b.stride()[i] << ']';
  }
  return os << ')';
}

namespace {

class Scanner {
public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool accept(std::string_view word) {
    skip_ws();
    if (s_.substr(pos_, word.size()) != word) return false;
    pos_ += word.size();
    return true;
  }
  Coord integer() {
    skip_ws();
    Coord v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  void finish() {
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw UsageError("cannot parse bbox '" + std::string(s_) + "': " + msg);
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

} // namespace

BBox parse_bbox(std::string_view text) {
  Scanner in(text);
  in.expect('(');
  if (in.accept("empty")) {
    in.expect('/');
    Coord d = in.integer();
    in.expect(')');
    in.finish();
    return BBox::empty(static_cast<int>(d));
  }
  std::vector<std::array<Coord, 3>> dims;
  do {
    in.expect('[');
    std::array<Coord, 3> lus{};
    lus[0] = in.integer();
    in.expect(':');
    lus[1] = in.integer();
    in.expect(':');
    lus[2] = in.integer();
    in.expect(']');
    dims.push_back(lus);
  } while (in.peek(',') && (in.expect(','), true));
  in.expect(')');
  in.finish();
  if (dims.empty() || dims.size() > static_cast<std::size_t>(max_dim)) in.fail("bad dimension");
  const int d = static_cast<int>(dims.size());
  Point lo(d), hi(d), st(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = dims[static_cast<std::size_t>(i)][0];
    hi[i] = dims[static_cast<std::size_t>(i)][1];
    st[i] = dims[static_cast<std::size_t>(i)][2];
  }
  return BBox(lo, hi, Stride(st));
}

} // namespace gridkit
