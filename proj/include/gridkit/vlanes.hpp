#ifndef GRIDKIT_VLANES_HPP
#define GRIDKIT_VLANES_HPP

/**
 * Reference semantics for explicit SIMD code: width-W value and mask
 * vectors whose lanes behave exactly like the scalar operations they
 * stand for.
 *
 * W is a run-time value (1, 2, 4, 8 or 16) carried by LaneConfig, so a
 * single binary can exercise every width. Only stores are masked; loads
 * rely on arrays being padded by at least W - 1 elements at both ends.
 *
 * Multiply-add is unfused (two roundings) unless the library is built
 * with GRIDKIT_FUSED_FMA.
 */

#include <array>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

#include "gridkit/errors.hpp"

namespace gridkit::lanes {

using Index = std::int64_t;

inline constexpr int max_width = 16;

struct LaneConfig {
  int width = 4;
  bool check_alignment = true;

  LaneConfig() = default;
  explicit LaneConfig(int w, bool check = true);

  /// Reads GRIDKIT_LANE_WIDTH and GRIDKIT_LANES_CHECK_ALIGNMENT (0/1).
  static LaneConfig from_env();
};

class LaneVector {
public:
  LaneVector() = default;
  LaneVector(int width, double fill);
  static LaneVector from_lanes(std::span<const double> lanes);

  int width() const { return width_; }
  double operator[](int l) const { return v_[static_cast<std::size_t>(l)]; }
  double& operator[](int l) { return v_[static_cast<std::size_t>(l)]; }

private:
  int width_ = 0;
  std::array<double, max_width> v_{};
};

class LaneMask {
public:
  LaneMask() = default;
  LaneMask(int width, bool fill);
  static LaneMask from_lanes(std::initializer_list<bool> lanes);

  int width() const { return width_; }
  bool operator[](int l) const { return m_[static_cast<std::size_t>(l)]; }
  void set(int l, bool on) { m_[static_cast<std::size_t>(l)] = on; }
  bool all() const;
  bool none() const;

  friend bool operator==(const LaneMask&, const LaneMask&) = default;

private:
  int width_ = 0;
  std::array<bool, max_width> m_{};
};

/**
 * Zero-initialised array of n logical elements with `padding` slack
 * elements on both sides, addressable as [-padding, n + padding).
 * Element 0 sits `base_alignment` elements past a vector boundary.
 */
class AlignedArray {
public:
  AlignedArray(std::size_t n, std::size_t padding, int base_alignment = 0);

  Index size() const { return n_; }
  Index padding() const { return pad_; }
  int base_alignment() const { return base_alignment_; }

  double& operator[](Index i) { return data_[static_cast<std::size_t>(i + pad_)]; }
  double operator[](Index i) const { return data_[static_cast<std::size_t>(i + pad_)]; }
  /// Bounds-checked against data + padding.
  double& at(Index i);
  double at(Index i) const;

  std::span<double> logical() { return {data_.data() + pad_, static_cast<std::size_t>(n_)}; }
  std::span<const double> logical() const { return {data_.data() + pad_, static_cast<std::size_t>(n_)}; }

  bool in_bounds(Index first, Index count) const { return first >= -pad_ && first + count <= n_ + pad_; }

private:
  Index n_;
  Index pad_;
  int base_alignment_;
  std::vector<double> data_;
};

// ----------------------------------------------------------------- memory

LaneVector vset1(const LaneConfig& cfg, double s);
LaneVector vload_aligned(const LaneConfig& cfg, const AlignedArray& a, Index i);
/// Load a[j .. j+W) where j - offset is vector aligned; offset is a hint.
LaneVector vload_off(const LaneConfig& cfg, int offset, const AlignedArray& a, Index j);
/// Load with unknown alignment.
LaneVector vload_unaligned(const LaneConfig& cfg, const AlignedArray& a, Index j);
void vstore_aligned(const LaneConfig& cfg, AlignedArray& a, Index i, const LaneVector& v);
void vstore_partial(const LaneConfig& cfg, AlignedArray& a, Index i, const LaneVector& v, const LaneMask& m);
/// Same as vstore_partial; the non-temporal hint has no observable effect.
void vstore_nta_partial(const LaneConfig& cfg, AlignedArray& a, Index i, const LaneVector& v,
                        const LaneMask& m);

// ------------------------------------------------------------- arithmetic

enum class LaneOp { add, sub, mul, div, min, max };
enum class CmpOp { lt, le, gt, ge, eq, ne };
enum class MathFn { sqrt, exp, log, sin, cos, fabs };

LaneVector velem(LaneOp op, const LaneVector& x, const LaneVector& y);
LaneVector vfma(const LaneVector& x, const LaneVector& y, const LaneVector& z);
LaneMask vcmp(CmpOp op, const LaneVector& x, const LaneVector& y);
LaneVector ifthen(const LaneMask& m, const LaneVector& then_v, const LaneVector& else_v);
LaneVector vmath(MathFn fn, const LaneVector& x);
LaneVector vcopysign(const LaneVector& magnitude, const LaneVector& sign);
LaneMask vsignbit(const LaneVector& x);
LaneMask visnan(const LaneVector& x);

inline LaneVector operator+(const LaneVector& x, const LaneVector& y) { return velem(LaneOp::add, x, y); }
inline LaneVector operator-(const LaneVector& x, const LaneVector& y) { return velem(LaneOp::sub, x, y); }
inline LaneVector operator*(const LaneVector& x, const LaneVector& y) { return velem(LaneOp::mul, x, y); }
inline LaneVector operator/(const LaneVector& x, const LaneVector& y) { return velem(LaneOp::div, x, y); }

/// Scalar multiply-add with the same rounding contract as vfma.
inline double scalar_fma(double x, double y, double z) {
#if GRIDKIT_FUSED_FMA
  return __builtin_fma(x, y, z);
#else
  return x * y + z;
#endif
}

// -------------------------------------------------------------- iteration

struct MaskedStep {
  Index i;
  LaneMask mask;
};

/**
 * The masked edge iterator: i runs over multiples of W from
 * floor(imin / W) * W while i < imax; lane l is active iff
 * imin <= i + l < imax.
 */
class MaskedRange {
public:
  MaskedRange(const LaneConfig& cfg, Index imin, Index imax);

  class iterator {
  public:
    using value_type = MaskedStep;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    MaskedStep operator*() const;
    iterator& operator++() {
      i_ += w_;
      return *this;
    }
    iterator operator++(int) {
      iterator t = *this;
      ++*this;
      return t;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.i_ == b.i_; }

  private:
    friend class MaskedRange;
    iterator(Index i, Index w, Index lo, Index hi) : i_(i), w_(w), lo_(lo), hi_(hi) {}
    Index i_ = 0, w_ = 1, lo_ = 0, hi_ = 0;
  };

  iterator begin() const { return {first_, width_, imin_, imax_}; }
  iterator end() const { return {last_, width_, imin_, imax_}; }

private:
  Index width_, imin_, imax_, first_, last_;
};

inline MaskedRange iterate_masked(const LaneConfig& cfg, Index imin, Index imax) {
  return MaskedRange(cfg, imin, imax);
}

} // namespace gridkit::lanes

#endif // GRIDKIT_VLANES_HPP
