#ifndef GRIDKIT_STENCIL_HPP
#define GRIDKIT_STENCIL_HPP

#include <cstdint>

#include "gridkit/lattice.hpp"
#include "gridkit/traverse.hpp"
#include "gridkit/vlanes.hpp"
#include "gridkit/worker_pool.hpp"

namespace gridkit::stencil {

// a[i] = b[i+1] - b[i] for 0 <= i < n-1
void forward_diff_scalar(const lanes::AlignedArray& b, lanes::AlignedArray& a);
void forward_diff_lanes(const lanes::LaneConfig& cfg, const lanes::AlignedArray& b, lanes::AlignedArray& a);

// a[i] = 0.5 * (b[i+1] - b[i-1]) for 1 <= i < n-1
void centered_diff_scalar(const lanes::AlignedArray& b, lanes::AlignedArray& a);
void centered_diff_lanes(const lanes::LaneConfig& cfg, const lanes::AlignedArray& b, lanes::AlignedArray& a);

/**
 * Scalar field on an nx * ny * nz grid, x fastest. Rows are padded to a
 * multiple of 16 elements so every row starts on a vector boundary for
 * any lane width.
 */
class Grid3 {
public:
  explicit Grid3(Point extents);

  const Point& extents() const { return n_; }
  lanes::Index pitch() const { return pitch_; }
  lanes::Index row(Coord y, Coord z) const { return pitch_ * (y + n_[1] * z); }
  double& operator()(Coord x, Coord y, Coord z) { return data_[row(y, z) + x]; }
  double operator()(Coord x, Coord y, Coord z) const { return data_[row(y, z) + x]; }
  lanes::AlignedArray& data() { return data_; }
  const lanes::AlignedArray& data() const { return data_; }

  /// Bitwise equality of every grid point (padding ignored).
  friend bool same_bits(const Grid3& a, const Grid3& b);

private:
  Point n_;
  lanes::Index pitch_;
  lanes::AlignedArray data_;
};

/// Deterministic pseudo-random contents in [-1, 1).
void fill_random(Grid3& g, std::uint64_t seed);

/// Interior points of a grid as a loop index space.
IndexSpace interior(const Grid3& g);

/**
 * One Jacobi step of u += c * laplacian(u) on the interior:
 * out = c * (((xm + xp) + (ym + yp)) + (zm + zp) - 6 * in) + in,
 * with the multiply-add following the lane fma contract. Boundary
 * points of out are left untouched.
 */
void laplacian_serial(const Grid3& in, Grid3& out, double c);
/// Outer dimension cut into pool.size() equal slabs, scalar inner loops.
void laplacian_naive(const Grid3& in, Grid3& out, double c, WorkerPool& pool);
/// Kernel body for one inner run of interior(in), vectorised with W lanes.
void laplacian_run(const lanes::LaneConfig& cfg, const Grid3& in, Grid3& out, double c, const InnerRun& run);
/// Tuned execution through the loop runner.
void laplacian_tuned(const Grid3& in, Grid3& out, double c, LoopRunner& runner);

} // namespace gridkit::stencil

#endif // GRIDKIT_STENCIL_HPP
