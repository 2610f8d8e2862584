#include "gridkit/setgen.hpp"

#include <utility>

namespace gridkit {

BBox random_box(Rng& rng, const BoxGenConfig& cfg) {
  Point lo(cfg.dim), hi(cfg.dim);
  for (int i = 0; i < cfg.dim; ++i) {
    const Coord s = cfg.stride[i];
    const Coord first = floor_mod(cfg.anchor[i], s);
    const Coord count = first < cfg.hull_extent ? (cfg.hull_extent - first + s - 1) / s : 1;
    std::uniform_int_distribution<Coord> pick(0, count - 1);
    Coord a = pick(rng);
    Coord b = pick(rng);
    if (a > b) std::swap(a, b);
    lo[i] = first + a * s;
    hi[i] = first + b * s;
  }
  return BBox(lo, hi, cfg.stride);
}

std::vector<BBox> random_boxes(Rng& rng, const BoxGenConfig& cfg, int count) {
  std::vector<BBox> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(random_box(rng, cfg));
  return out;
}

std::vector<BBox> grid_of_boxes(int dim, int n, Coord box_size, Coord gap) {
  if (n <= 0 || (n & (n - 1)) != 0) throw UsageError("grid_of_boxes: n must be a power of two");
  int exponent = 0;
  while ((1 << exponent) < n) ++exponent;
  Point cells(dim);
  for (int i = 0; i < dim; ++i) {
    // leading dimensions take the remainder
    const int e = exponent / dim + (i < exponent % dim ? 1 : 0);
    cells[i] = Coord{1} << e;
  }
  std::vector<BBox> out;
  out.reserve(static_cast<std::size_t>(n));
  const Coord pitch = box_size + gap;
  const BBox index_space(Point(dim), cells - Point(dim, 1));
  Point idx = index_space.lower();
  // row-major over the cell grid, dimension 0 fastest
  while (true) {
    out.emplace_back(idx * pitch, idx * pitch + Point(dim, box_size - 1));
    int i = 0;
    for (; i < dim; ++i) {
      if (++idx[i] < cells[i]) break;
      idx[i] = 0;
    }
    if (i == dim) break;
  }
  return out;
}

} // namespace gridkit
