#include "gridkit/stencil.hpp"

#include <cstring>
#include <random>

namespace gridkit::stencil {

using lanes::AlignedArray;
using lanes::Index;
using lanes::LaneConfig;

namespace {

void require_same_size(const AlignedArray& a, const AlignedArray& b) {
  if (a.size() != b.size()) throw UsageError("stencil: input and output sizes differ");
}

inline double laplacian_point(double c, double xm, double xp, double ym, double yp, double zm, double zp,
                              double u) {
  const double lap = ((xm + xp) + (ym + yp)) + (zm + zp) - 6.0 * u;
  return lanes::scalar_fma(c, lap, u);
}

} // namespace

void forward_diff_scalar(const AlignedArray& b, AlignedArray& a) {
  require_same_size(a, b);
  for (Index i = 0; i < b.size() - 1; ++i) a[i] = b[i + 1] - b[i];
}

void forward_diff_lanes(const LaneConfig& cfg, const AlignedArray& b, AlignedArray& a) {
  require_same_size(a, b);
  if (b.size() < 1) return;
  for (const auto& [i, mask] : lanes::iterate_masked(cfg, 0, b.size() - 1)) {
    const auto bi = lanes::vload_aligned(cfg, b, i);
    const auto bip = lanes::vload_off(cfg, +1, b, i + 1);
    lanes::vstore_partial(cfg, a, i, bip - bi, mask);
  }
}

void centered_diff_scalar(const AlignedArray& b, AlignedArray& a) {
  require_same_size(a, b);
  for (Index i = 1; i < b.size() - 1; ++i) a[i] = 0.5 * (b[i + 1] - b[i - 1]);
}

void centered_diff_lanes(const LaneConfig& cfg, const AlignedArray& b, AlignedArray& a) {
  require_same_size(a, b);
  if (b.size() < 2) return;
  for (const auto& [i, mask] : lanes::iterate_masked(cfg, 1, b.size() - 1)) {
    const auto bim = lanes::vload_off(cfg, -1, b, i - 1);
    const auto bip = lanes::vload_off(cfg, +1, b, i + 1);
    const auto ai = lanes::vset1(cfg, 0.5) * (bip - bim);
    lanes::vstore_nta_partial(cfg, a, i, ai, mask);
  }
}

// ------------------------------------------------------------------ Grid3

namespace {

Index padded_pitch(Coord nx) { return (nx + lanes::max_width - 1) / lanes::max_width * lanes::max_width; }

std::size_t grid_size(const Point& n) {
  if (n.dim() != 3) throw UsageError("Grid3 needs three extents");
  for (int i = 0; i < 3; ++i) {
    if (n[i] < 1) throw UsageError("Grid3 extents must be positive");
  }
  return static_cast<std::size_t>(detail::checked_mul(detail::checked_mul(padded_pitch(n[0]), n[1]), n[2]));
}

} // namespace

Grid3::Grid3(Point extents)
    : n_(extents), pitch_(padded_pitch(extents[0])), data_(grid_size(extents), lanes::max_width) {}

bool same_bits(const Grid3& a, const Grid3& b) {
  if (a.n_ != b.n_) return false;
  for (Coord z = 0; z < a.n_[2]; ++z) {
    for (Coord y = 0; y < a.n_[1]; ++y) {
      const double* pa = &a.data_.logical()[static_cast<std::size_t>(a.row(y, z))];
      const double* pb = &b.data_.logical()[static_cast<std::size_t>(b.row(y, z))];
      if (std::memcmp(pa, pb, static_cast<std::size_t>(a.n_[0]) * sizeof(double)) != 0) return false;
    }
  }
  return true;
}

void fill_random(Grid3& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Point& n = g.extents();
  for (Coord z = 0; z < n[2]; ++z)
    for (Coord y = 0; y < n[1]; ++y)
      for (Coord x = 0; x < n[0]; ++x) g(x, y, z) = u(rng);
}

IndexSpace interior(const Grid3& g) {
  const Point& n = g.extents();
  Point hi(3);
  for (int i = 0; i < 3; ++i) hi[i] = std::max<Coord>(1, n[i] - 1);
  return IndexSpace(Point(3, 1), hi, tuning::AlignmentClass::cache_line);
}

namespace {

void laplacian_slab(const Grid3& in, Grid3& out, double c, Coord z0, Coord z1) {
  const Point& n = in.extents();
  for (Coord z = z0; z < z1; ++z)
    for (Coord y = 1; y < n[1] - 1; ++y)
      for (Coord x = 1; x < n[0] - 1; ++x) {
        out(x, y, z) = laplacian_point(c, in(x - 1, y, z), in(x + 1, y, z), in(x, y - 1, z), in(x, y + 1, z),
                                       in(x, y, z - 1), in(x, y, z + 1), in(x, y, z));
      }
}

void require_same_grid(const Grid3& in, const Grid3& out) {
  if (in.extents() != out.extents()) throw UsageError("laplacian: grids differ in shape");
}

} // namespace

void laplacian_serial(const Grid3& in, Grid3& out, double c) {
  require_same_grid(in, out);
  laplacian_slab(in, out, c, 1, in.extents()[2] - 1);
}

void laplacian_naive(const Grid3& in, Grid3& out, double c, WorkerPool& pool) {
  require_same_grid(in, out);
  const Coord lo = 1, hi = in.extents()[2] - 1;
  if (hi <= lo) return;
  const Coord parts = pool.size();
  pool.run(static_cast<std::size_t>(parts), [&](std::size_t t, int) {
    const Coord k = static_cast<Coord>(t);
    laplacian_slab(in, out, c, lo + k * (hi - lo) / parts, lo + (k + 1) * (hi - lo) / parts);
  });
}

void laplacian_run(const LaneConfig& cfg, const Grid3& in, Grid3& out, double c, const InnerRun& run) {
  const AlignedArray& u = in.data();
  const Index base = in.row(run.index[1], run.index[2]);
  const Index i = base + run.index[0];
  const Index plane = in.pitch() * in.extents()[1];
  using namespace lanes;
  const auto uc = vload_aligned(cfg, u, i);
  const auto xm = vload_off(cfg, -1, u, i - 1);
  const auto xp = vload_off(cfg, +1, u, i + 1);
  const auto ym = vload_aligned(cfg, u, i - in.pitch());
  const auto yp = vload_aligned(cfg, u, i + in.pitch());
  const auto zm = vload_aligned(cfg, u, i - plane);
  const auto zp = vload_aligned(cfg, u, i + plane);
  const auto lap = ((xm + xp) + (ym + yp)) + (zm + zp) - vset1(cfg, 6.0) * uc;
  vstore_nta_partial(cfg, out.data(), i, vfma(vset1(cfg, c), lap, uc), run.mask);
}

void laplacian_tuned(const Grid3& in, Grid3& out, double c, LoopRunner& runner) {
  require_same_grid(in, out);
  const IndexSpace space = interior(in);
  if (space.empty()) return;
  const LaneConfig cfg(runner.tuner().topology().lane_width);
  runner.run("laplacian3d", space, [&](const InnerRun& r) { laplacian_run(cfg, in, out, c, r); });
}

} // namespace gridkit::stencil
