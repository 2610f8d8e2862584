#include "gridkit/vlanes.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "gridkit/lattice.hpp"

namespace gridkit::lanes {

namespace {

void require_width(const LaneVector& x, const LaneVector& y) {
  if (x.width() != y.width()) throw UsageError("lane vectors of different width");
}

void check_access(const LaneConfig& cfg, const AlignedArray& a, Index first, const char* what) {
  if (!a.in_bounds(first, cfg.width)) {
    throw BoundsError(std::string(what) + ": lanes [" + std::to_string(first) + ", " +
                      std::to_string(first + cfg.width) + ") outside data + padding");
  }
}

void check_aligned(const LaneConfig& cfg, const AlignedArray& a, Index at, const char* what) {
  if (cfg.check_alignment && floor_mod(at + a.base_alignment(), cfg.width) != 0) {
    throw ContractViolation(std::string(what) + ": index " + std::to_string(at) +
                            " is not aligned to the vector width " + std::to_string(cfg.width));
  }
}

template <class F>
LaneVector map_lanes(const LaneVector& x, F f) {
  LaneVector r(x.width(), 0.0);
  for (int l = 0; l < x.width(); ++l) r[l] = f(x[l]);
  return r;
}

template <class F>
LaneMask test_lanes(const LaneVector& x, F f) {
  LaneMask m(x.width(), false);
  for (int l = 0; l < x.width(); ++l) m.set(l, f(x[l]));
  return m;
}

} // namespace

LaneConfig::LaneConfig(int w, bool check) : width(w), check_alignment(check) {
  if (w < 1 || w > max_width || (w & (w - 1)) != 0) {
    throw UsageError("lane width must be a power of two in [1, 16], got " + std::to_string(w));
  }
}

LaneConfig LaneConfig::from_env() {
  LaneConfig cfg;
  if (const char* w = std::getenv("GRIDKIT_LANE_WIDTH")) cfg = LaneConfig(std::atoi(w));
  if (const char* c = std::getenv("GRIDKIT_LANES_CHECK_ALIGNMENT")) cfg.check_alignment = std::atoi(c) != 0;
  return cfg;
}

LaneVector::LaneVector(int width, double fill) : width_(width) {
  if (width < 1 || width > max_width) throw UsageError("bad lane width");
  for (int l = 0; l < width; ++l) v_[static_cast<std::size_t>(l)] = fill;
}

LaneVector LaneVector::from_lanes(std::span<const double> lanes) {
  LaneVector v(static_cast<int>(lanes.size()), 0.0);
  for (int l = 0; l < v.width(); ++l) v[l] = lanes[static_cast<std::size_t>(l)];
  return v;
}

LaneMask::LaneMask(int width, bool fill) : width_(width) {
  if (width < 1 || width > max_width) throw UsageError("bad lane width");
  for (int l = 0; l < width; ++l) m_[static_cast<std::size_t>(l)] = fill;
}

LaneMask LaneMask::from_lanes(std::initializer_list<bool> lanes) {
  LaneMask m(static_cast<int>(lanes.size()), false);
  int l = 0;
  for (bool b : lanes) m.set(l++, b);
  return m;
}

bool LaneMask::all() const {
  for (int l = 0; l < width_; ++l) {
    if (!(*this)[l]) return false;
  }
  return true;
}

bool LaneMask::none() const {
  for (int l = 0; l < width_; ++l) {
    if ((*this)[l]) return false;
  }
  return true;
}

AlignedArray::AlignedArray(std::size_t n, std::size_t padding, int base_alignment)
    : n_(static_cast<Index>(n)), pad_(static_cast<Index>(padding)), base_alignment_(base_alignment),
      data_(n + 2 * padding, 0.0) {}

double& AlignedArray::at(Index i) {
  if (!in_bounds(i, 1)) throw BoundsError("AlignedArray index " + std::to_string(i) + " out of range");
  return (*this)[i];
}

double AlignedArray::at(Index i) const {
  if (!in_bounds(i, 1)) throw BoundsError("AlignedArray index " + std::to_string(i) + " out of range");
  return (*this)[i];
}

// ----------------------------------------------------------------- memory

LaneVector vset1(const LaneConfig& cfg, double s) { return LaneVector(cfg.width, s); }

LaneVector vload_unaligned(const LaneConfig& cfg, const AlignedArray& a, Index j) {
  check_access(cfg, a, j, "vload");
  LaneVector v(cfg.width, 0.0);
  for (int l = 0; l < cfg.width; ++l) v[l] = a[j + l];
  return v;
}

LaneVector vload_aligned(const LaneConfig& cfg, const AlignedArray& a, Index i) {
  check_aligned(cfg, a, i, "vload_aligned");
  return vload_unaligned(cfg, a, i);
}

LaneVector vload_off(const LaneConfig& cfg, int offset, const AlignedArray& a, Index j) {
  check_aligned(cfg, a, j - offset, "vload_off");
  return vload_unaligned(cfg, a, j);
}

void vstore_aligned(const LaneConfig& cfg, AlignedArray& a, Index i, const LaneVector& v) {
  vstore_partial(cfg, a, i, v, LaneMask(cfg.width, true));
}

void vstore_partial(const LaneConfig& cfg, AlignedArray& a, Index i, const LaneVector& v, const LaneMask& m) {
  check_aligned(cfg, a, i, "vstore");
  check_access(cfg, a, i, "vstore");
  if (v.width() != cfg.width || m.width() != cfg.width) throw UsageError("vstore: width mismatch");
  for (int l = 0; l < cfg.width; ++l) {
    if (m[l]) a[i + l] = v[l];
  }
}

void vstore_nta_partial(const LaneConfig& cfg, AlignedArray& a, Index i, const LaneVector& v,
                        const LaneMask& m) {
  vstore_partial(cfg, a, i, v, m);
}

// ------------------------------------------------------------- arithmetic

LaneVector velem(LaneOp op, const LaneVector& x, const LaneVector& y) {
  require_width(x, y);
  LaneVector r(x.width(), 0.0);
  for (int l = 0; l < x.width(); ++l) {
    const double a = x[l], b = y[l];
    switch (op) {
    case LaneOp::add: r[l] = a + b; break;
    case LaneOp::sub: r[l] = a - b; break;
    case LaneOp::mul: r[l] = a * b; break;
    case LaneOp::div: r[l] = a / b; break;
    case LaneOp::min: r[l] = std::fmin(a, b); break;
    case LaneOp::max: r[l] = std::fmax(a, b); break;
    }
  }
  return r;
}

LaneVector vfma(const LaneVector& x, const LaneVector& y, const LaneVector& z) {
  require_width(x, y);
  require_width(x, z);
  LaneVector r(x.width(), 0.0);
  for (int l = 0; l < x.width(); ++l) r[l] = scalar_fma(x[l], y[l], z[l]);
  return r;
}

LaneMask vcmp(CmpOp op, const LaneVector& x, const LaneVector& y) {
  require_width(x, y);
  LaneMask m(x.width(), false);
  for (int l = 0; l < x.width(); ++l) {
    const double a = x[l], b = y[l];
    bool on = false;
    switch (op) {
    case CmpOp::lt: on = a < b; break;
    case CmpOp::le: on = a <= b; break;
    case CmpOp::gt: on = a > b; break;
    case CmpOp::ge: on = a >= b; break;
    case CmpOp::eq: on = a == b; break;
    case CmpOp::ne: on = a != b; break;
    }
    m.set(l, on);
  }
  return m;
}

LaneVector ifthen(const LaneMask& m, const LaneVector& then_v, const LaneVector& else_v) {
  require_width(then_v, else_v);
  if (m.width() != then_v.width()) throw UsageError("ifthen: mask width mismatch");
  LaneVector r(then_v.width(), 0.0);
  for (int l = 0; l < r.width(); ++l) r[l] = m[l] ? then_v[l] : else_v[l];
  return r;
}

LaneVector vmath(MathFn fn, const LaneVector& x) {
  switch (fn) {
  case MathFn::sqrt: return map_lanes(x, [](double a) { return std::sqrt(a); });
  case MathFn::exp: return map_lanes(x, [](double a) { return std::exp(a); });
  case MathFn::log: return map_lanes(x, [](double a) { return std::log(a); });
  case MathFn::sin: return map_lanes(x, [](double a) { return std::sin(a); });
  case MathFn::cos: return map_lanes(x, [](double a) { return std::cos(a); });
  case MathFn::fabs: return map_lanes(x, [](double a) { return std::fabs(a); });
  }
  return x;
}

LaneVector vcopysign(const LaneVector& magnitude, const LaneVector& sign) {
  require_width(magnitude, sign);
  LaneVector r(magnitude.width(), 0.0);
  for (int l = 0; l < r.width(); ++l) r[l] = std::copysign(magnitude[l], sign[l]);
  return r;
}

LaneMask vsignbit(const LaneVector& x) {
  return test_lanes(x, [](double a) { return std::signbit(a); });
}

LaneMask visnan(const LaneVector& x) {
  return test_lanes(x, [](double a) { return std::isnan(a); });
}

// -------------------------------------------------------------- iteration

MaskedRange::MaskedRange(const LaneConfig& cfg, Index imin, Index imax)
    : width_(cfg.width), imin_(imin), imax_(imax) {
  if (imin > imax) throw UsageError("iterate_masked: imin > imax");
  first_ = floor_div(imin, width_) * width_;
  // first multiple of W at or past imax; equals first_ for an empty range
  last_ = imin == imax ? first_ : floor_div(imax + width_ - 1, width_) * width_;
}

MaskedStep MaskedRange::iterator::operator*() const {
  LaneMask m(static_cast<int>(w_), false);
  for (int l = 0; l < w_; ++l) m.set(l, i_ + l >= lo_ && i_ + l < hi_);
  return {i_, m};
}

} // namespace gridkit::lanes
