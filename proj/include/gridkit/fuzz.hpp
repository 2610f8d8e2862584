#ifndef GRIDKIT_FUZZ_HPP
#define GRIDKIT_FUZZ_HPP

// Randomized comparison of BBoxSet against the point-set oracle.

#include <cstdint>
#include <optional>
#include <string>

#include "gridkit/lattice.hpp"

namespace gridkit::fuzz {

struct FuzzConfig {
  int dim = 2;
  int max_boxes = 30;  // per operand, drawn uniformly from [0, max_boxes]
  Coord hull = 32;     // corners in [0, hull)^dim
};

struct Mismatch {
  std::uint64_t seed = 0;
  std::string op;
  std::string lhs; // serialized operands
  std::string rhs;
};

/**
 * One case, fully determined by (seed, cfg): two operands on a shared
 * random sub-lattice (per-dimension stride 1, 2 or 4), checked for the
 * four set operations, shift, expand, coarsen, refine and to_bboxes.
 * Returns the first disagreement.
 */
std::optional<Mismatch> check_case(std::uint64_t seed, const FuzzConfig& cfg);

} // namespace gridkit::fuzz

#endif // GRIDKIT_FUZZ_HPP
