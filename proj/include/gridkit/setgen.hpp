#ifndef GRIDKIT_SETGEN_HPP
#define GRIDKIT_SETGEN_HPP

// Reproducible box generators for fuzzing and benchmarks.

#include <random>
#include <vector>

#include "gridkit/lattice.hpp"

namespace gridkit {

using Rng = std::mt19937_64;

struct BoxGenConfig {
  int dim = 2;
  Coord hull_extent = 32; // corners drawn from lattice points in [0, hull_extent)
  Stride stride = Stride::ones(2);
  Point anchor = Point(2);
};

/// Uniform corners in the hull; inverted corners are swapped, so no draw is rejected.
BBox random_box(Rng& rng, const BoxGenConfig& cfg);
std::vector<BBox> random_boxes(Rng& rng, const BoxGenConfig& cfg, int count);

/// n disjoint boxes of edge `box_size` on a d-dimensional grid with a gap
/// of `gap` points between neighbours. n must be a power of two; the
/// exponent is spread as evenly as possible over the dimensions.
std::vector<BBox> grid_of_boxes(int dim, int n, Coord box_size = 2, Coord gap = 1);

} // namespace gridkit

#endif // GRIDKIT_SETGEN_HPP
