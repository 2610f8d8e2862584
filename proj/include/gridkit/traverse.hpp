#ifndef GRIDKIT_TRAVERSE_HPP
#define GRIDKIT_TRAVERSE_HPP

/**
 * Loop execution: split an index space into coarse-thread blocks, cache
 * tiles, fine-thread slices and lane-aligned inner runs, run a kernel
 * over the runs on a worker pool, and report the timing to the tuner.
 *
 * Dimension 0 is the innermost loop. Tiles sit at absolute multiples of
 * the tile size, so tile and slice edges in dimension 0 are multiples
 * of the vector width everywhere except at the space boundary.
 */

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gridkit/lattice.hpp"
#include "gridkit/tuner.hpp"
#include "gridkit/vlanes.hpp"
#include "gridkit/worker_pool.hpp"

namespace gridkit {

/// Half-open box [lo, hi).
struct IndexSpace {
  Point lo;
  Point hi;
  tuning::AlignmentClass alignment = tuning::AlignmentClass::none;

  IndexSpace() = default;
  IndexSpace(Point lo, Point hi, tuning::AlignmentClass alignment = tuning::AlignmentClass::none);

  int dim() const { return lo.dim(); }
  Point extents() const { return hi - lo; }
  bool empty() const;
  Coord volume() const;
};

/// [lo, hi) as the inclusive unit-stride box [lo, hi - 1].
BBox to_bbox(const IndexSpace& s);
IndexSpace from_bbox(const BBox& b, tuning::AlignmentClass alignment = tuning::AlignmentClass::none);

struct FineSlice {
  IndexSpace space;
  int rank = 0; // which fine thread of the block runs it
};

struct Tile {
  IndexSpace space;
  std::vector<FineSlice> slices;
};

struct CoarseBlock {
  IndexSpace space;
  std::vector<Tile> tiles;
};

struct SplitPlan {
  IndexSpace space;
  int vector_width = 1;
  int n_fine = 1;
  std::vector<CoarseBlock> blocks;
};

SplitPlan build_plan(const IndexSpace& space, const tuning::ExecParams& p);

/// W consecutive indices starting at a lane-aligned index[0]; lane l
/// stands for index + l * e0 and is active iff mask[l].
struct InnerRun {
  Point index;
  lanes::LaneMask mask;
};

/// Inner runs of a slice, outer dimensions in row-major order.
template <class F>
void for_each_run(const IndexSpace& slice, int width, F&& f) {
  if (slice.empty()) return;
  const int d = slice.dim();
  const lanes::LaneConfig cfg(width, false);
  Point outer = slice.lo;
  for (;;) {
    for (const auto& step : lanes::iterate_masked(cfg, slice.lo[0], slice.hi[0])) {
      Point at = outer;
      at[0] = step.i;
      f(InnerRun{at, step.mask});
    }
    int k = 1;
    for (; k < d; ++k) {
      if (++outer[k] < slice.hi[k]) break;
      outer[k] = slice.lo[k];
    }
    if (k == d) return;
  }
}

using RunKernel = std::function<void(const InnerRun&)>;

/// Runs every slice of the plan once. Tasks are (block, fine rank)
/// pairs pulled dynamically by the pool workers.
void execute_plan(const SplitPlan& plan, const RunKernel& kernel, WorkerPool& pool);

/**
 * One tuned execution: next_params, build_plan, execute, record_timing.
 * A throwing kernel propagates after the pool is idle and its timing is
 * not recorded.
 */
tuning::Seconds run_loop(tuning::SetupTuner& tuner, const IndexSpace& space, const RunKernel& kernel,
                         WorkerPool& pool, tuning::ExecutionLog* log = nullptr);

/// Owns the tuner, the pool and the log for a program's loops.
class LoopRunner {
public:
  explicit LoopRunner(tuning::TopologyConfig topo, int n_workers = 0);

  tuning::Seconds run(const std::string& site_id, const IndexSpace& space, const RunKernel& kernel);

  tuning::LoopSetup setup_for(const std::string& site_id, const IndexSpace& space) const;
  tuning::Tuner& tuner() { return tuner_; }
  WorkerPool& pool() { return *pool_; }
  const tuning::ExecutionLog& log() const { return log_; }

private:
  tuning::Tuner tuner_;
  std::unique_ptr<WorkerPool> pool_;
  tuning::ExecutionLog log_;
};

} // namespace gridkit

#endif // GRIDKIT_TRAVERSE_HPP
