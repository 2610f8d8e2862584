#ifndef GRIDKIT_LATTICE_HPP
#define GRIDKIT_LATTICE_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gridkit/errors.hpp"

namespace gridkit {

using Coord = std::int64_t;

inline constexpr int max_dim = 4;

/// Floor division and non-negative modulus for signed lattice coordinates.
constexpr Coord floor_div(Coord a, Coord b) {
  Coord q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
constexpr Coord floor_mod(Coord a, Coord b) { return a - floor_div(a, b) * b; }

/**
 * A point (or offset vector) on the integer lattice, 1 <= dim <= 4.
 *
 * Unused trailing components are kept at zero so that defaulted
 * comparison is lexicographic over the used components.
 */
class Point {
public:
  Point() = default;
  explicit Point(int dim, Coord fill = 0);
  Point(std::initializer_list<Coord> coords);
  static Point unit(int dim, int direction);

  int dim() const { return dim_; }
  Coord operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  Coord& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator-() const;
  Point operator*(const Point& o) const; // componentwise
  Point operator*(Coord s) const;

  Coord product() const;

  friend auto operator<=>(const Point&, const Point&) = default;
  friend bool operator==(const Point&, const Point&) = default;

private:
  int dim_ = 0;
  std::array<Coord, max_dim> c_{};
};

std::ostream& operator<<(std::ostream& os, const Point& p);

/// Per-dimension lattice spacing; every component strictly positive.
class Stride {
public:
  Stride() = default;
  explicit Stride(Point steps);
  static Stride ones(int dim) { return Stride(Point(dim, 1)); }

  int dim() const { return steps_.dim(); }
  Coord operator[](int i) const { return steps_[i]; }
  const Point& steps() const { return steps_; }

  friend auto operator<=>(const Stride&, const Stride&) = default;
  friend bool operator==(const Stride&, const Stride&) = default;

private:
  Point steps_;
};

/**
 * Rectangular region of a strided lattice: inclusive lower and upper
 * corners, each dimension satisfying (upper - lower) % stride == 0.
 *
 * The empty box is a distinguished state; two empty boxes of the same
 * dimension compare equal regardless of the stride they were made with.
 */
class BBox {
public:
  BBox() = default;
  BBox(Point lower, Point upper, Stride stride);
  BBox(Point lower, Point upper); // unit stride
  static BBox empty(int dim);

  int dim() const { return dim_; }
  bool is_empty() const { return empty_; }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  const Stride& stride() const { return stride_; }

  friend bool operator==(const BBox& a, const BBox& b);
  /// Lexicographic by (lower, upper); empty boxes sort first.
  friend bool operator<(const BBox& a, const BBox& b);

private:
  int dim_ = 0;
  bool empty_ = true;
  Point lower_, upper_;
  Stride stride_;
};

bool bbox_contains(const BBox& b, const Point& p);

/// Requires equal strides and congruent lower corners unless either box is empty.
BBox bbox_intersect(const BBox& a, const BBox& b);

/// Translate by v (lattice units, not stride units).
BBox bbox_shift(const BBox& b, const Point& v);

/// Grow by lo/hi stride steps per side; negative counts shrink, over-shrink gives empty.
BBox bbox_expand(const BBox& b, const Point& lo, const Point& hi);

/// Number of lattice points; throws ResourceError instead of wrapping.
Coord bbox_point_count(const BBox& b);

/// True iff both boxes live on the same sub-lattice (same stride, congruent corners).
bool same_sublattice(const BBox& a, const BBox& b);

/// Physical coordinates x_i = origin_i + n_i * spacing_i.
struct GridGeometry {
  std::vector<double> origin;
  std::vector<double> spacing;

  GridGeometry(std::vector<double> origin, std::vector<double> spacing);
  int dim() const { return static_cast<int>(origin.size()); }
};

std::vector<double> to_physical(const GridGeometry& g, const Point& p);

// Text form "([l0:u0:s0],[l1:u1:s1])", empty box "(empty/d)".
std::string to_string(const BBox& b);
BBox parse_bbox(std::string_view text);
std::ostream& operator<<(std::ostream& os, const BBox& b);

namespace detail {
void require_same_dim(int a, int b, const char* what);
Coord checked_mul(Coord a, Coord b);
Coord checked_add(Coord a, Coord b);
} // namespace detail

} // namespace gridkit

#endif // GRIDKIT_LATTICE_HPP
