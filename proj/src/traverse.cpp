#include "gridkit/traverse.hpp"

#include <chrono>

namespace gridkit {

namespace {

Coord ceil_div(Coord a, Coord b) { return -floor_div(-a, b); }

// Split [0, n) into `parts` contiguous near-equal ranges; empty ranges are dropped.
std::vector<std::pair<Coord, Coord>> even_split(Coord n, Coord parts) {
  std::vector<std::pair<Coord, Coord>> out;
  for (Coord g = 0; g < parts; ++g) {
    const Coord b = g * n / parts, e = (g + 1) * n / parts;
    if (b < e) out.emplace_back(b, e);
  }
  return out;
}

// Visit every multi-index in [0, n) with dimension 0 fastest.
template <class F>
void for_each_index(const Point& n, F&& f) {
  const int d = n.dim();
  for (int i = 0; i < d; ++i) {
    if (n[i] <= 0) return;
  }
  Point k(d, 0);
  for (;;) {
    f(k);
    int i = 0;
    for (; i < d; ++i) {
      if (++k[i] < n[i]) break;
      k[i] = 0;
    }
    if (i == d) return;
  }
}

} // namespace

IndexSpace::IndexSpace(Point l, Point h, tuning::AlignmentClass a) : lo(l), hi(h), alignment(a) {
  detail::require_same_dim(lo.dim(), hi.dim(), "IndexSpace");
  for (int i = 0; i < lo.dim(); ++i) {
    if (lo[i] > hi[i]) throw UsageError("index space needs lo <= hi");
  }
}

bool IndexSpace::empty() const {
  for (int i = 0; i < dim(); ++i) {
    if (lo[i] >= hi[i]) return true;
  }
  return false;
}

Coord IndexSpace::volume() const {
  if (empty()) return 0;
  Coord v = 1;
  for (int i = 0; i < dim(); ++i) v = detail::checked_mul(v, hi[i] - lo[i]);
  return v;
}

BBox to_bbox(const IndexSpace& s) {
  if (s.empty()) return BBox::empty(s.dim());
  return BBox(s.lo, s.hi - Point(s.dim(), 1));
}

IndexSpace from_bbox(const BBox& b, tuning::AlignmentClass alignment) {
  if (b.stride() != Stride::ones(b.dim())) throw UsageError("from_bbox: only unit-stride boxes map to index spaces");
  if (b.is_empty()) return IndexSpace(Point(b.dim(), 0), Point(b.dim(), 0), alignment);
  return IndexSpace(b.lower(), b.upper() + Point(b.dim(), 1), alignment);
}

SplitPlan build_plan(const IndexSpace& space, const tuning::ExecParams& p) {
  const int d = space.dim();
  if (p.coarse_split.dim() != d || p.tile.dim() != d || p.fine_split.dim() != d) {
    throw UsageError("build_plan: params and space differ in dimension");
  }
  const lanes::LaneConfig lanes_cfg(p.vector_width); // validates W
  const Coord W = lanes_cfg.width;
  if (p.tile[0] % W != 0) throw UsageError("build_plan: innermost tile is not a multiple of the vector width");
  for (int i = 0; i < d; ++i) {
    if (p.tile[i] < 1 || p.coarse_split[i] < 1 || p.fine_split[i] < 1) throw UsageError("build_plan: bad params");
  }

  SplitPlan plan;
  plan.space = space;
  plan.vector_width = static_cast<int>(W);
  plan.n_fine = static_cast<int>(p.fine_split.product());
  if (space.empty()) return plan;

  // tile grid, anchored at absolute multiples of the tile size
  Point first(d, 0), ntiles(d, 0);
  for (int i = 0; i < d; ++i) {
    first[i] = floor_div(space.lo[i], p.tile[i]);
    ntiles[i] = ceil_div(space.hi[i], p.tile[i]) - first[i];
  }
  auto tile_space = [&](const Point& k) {
    Point lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = std::max(space.lo[i], (first[i] + k[i]) * p.tile[i]);
      hi[i] = std::min(space.hi[i], (first[i] + k[i] + 1) * p.tile[i]);
    }
    return IndexSpace(lo, hi, space.alignment);
  };

  std::vector<std::vector<std::pair<Coord, Coord>>> block_ranges;
  Point nblocks(d);
  for (int i = 0; i < d; ++i) {
    block_ranges.push_back(even_split(ntiles[i], p.coarse_split[i]));
    nblocks[i] = static_cast<Coord>(block_ranges.back().size());
  }

  for_each_index(nblocks, [&](const Point& b) {
    CoarseBlock block;
    Point tlo(d), tcount(d);
    for (int i = 0; i < d; ++i) {
      const auto [t0, t1] = block_ranges[static_cast<std::size_t>(i)][static_cast<std::size_t>(b[i])];
      tlo[i] = t0;
      tcount[i] = t1 - t0;
    }
    block.space = IndexSpace(tile_space(tlo).lo, tile_space(tlo + tcount - Point(d, 1)).hi, space.alignment);
    for_each_index(tcount, [&](const Point& k) {
      Tile tile;
      tile.space = tile_space(tlo + k);
      const IndexSpace& ts = tile.space;
      // fine slices: dimension 0 in whole vectors, the others by index count
      const Coord c0 = floor_div(ts.lo[0], W);
      std::vector<std::vector<std::pair<Coord, Coord>>> ranges;
      std::vector<std::vector<Coord>> ranks;
      for (int i = 0; i < d; ++i) {
        std::vector<std::pair<Coord, Coord>> r;
        std::vector<Coord> rk;
        const Coord n = i == 0 ? ceil_div(ts.hi[0], W) - c0 : ts.hi[i] - ts.lo[i];
        for (Coord g = 0; g < p.fine_split[i]; ++g) {
          const Coord b0 = g * n / p.fine_split[i], b1 = (g + 1) * n / p.fine_split[i];
          if (b0 >= b1) continue;
          if (i == 0) r.emplace_back(std::max(ts.lo[0], (c0 + b0) * W), std::min(ts.hi[0], (c0 + b1) * W));
          else r.emplace_back(ts.lo[i] + b0, ts.lo[i] + b1);
          rk.push_back(g);
        }
        ranges.push_back(std::move(r));
        ranks.push_back(std::move(rk));
      }
      Point nslices(d);
      for (int i = 0; i < d; ++i) nslices[i] = static_cast<Coord>(ranges[static_cast<std::size_t>(i)].size());
      for_each_index(nslices, [&](const Point& s) {
        Point lo(d), hi(d);
        Coord rank = 0;
        for (int i = d - 1; i >= 0; --i) {
          const auto& r = ranges[static_cast<std::size_t>(i)][static_cast<std::size_t>(s[i])];
          lo[i] = r.first;
          hi[i] = r.second;
          rank = rank * p.fine_split[i] + ranks[static_cast<std::size_t>(i)][static_cast<std::size_t>(s[i])];
        }
        tile.slices.push_back({IndexSpace(lo, hi, space.alignment), static_cast<int>(rank)});
      });
      block.tiles.push_back(std::move(tile));
    });
    plan.blocks.push_back(std::move(block));
  });
  return plan;
}

void execute_plan(const SplitPlan& plan, const RunKernel& kernel, WorkerPool& pool) {
  const std::size_t n_fine = static_cast<std::size_t>(plan.n_fine);
  pool.run(plan.blocks.size() * n_fine, [&](std::size_t task, int) {
    const CoarseBlock& block = plan.blocks[task / n_fine];
    const int rank = static_cast<int>(task % n_fine);
    for (const Tile& tile : block.tiles) {
      for (const FineSlice& s : tile.slices) {
        if (s.rank == rank) for_each_run(s.space, plan.vector_width, kernel);
      }
    }
  });
}

tuning::Seconds run_loop(tuning::SetupTuner& tuner, const IndexSpace& space, const RunKernel& kernel,
                         WorkerPool& pool, tuning::ExecutionLog* log) {
  if (space.extents() != tuner.setup().extents) throw UsageError("run_loop: space does not match the loop setup");
  const tuning::ExecParams p = tuner.next_params();
  const tuning::Phase phase = tuner.phase();
  const auto t0 = std::chrono::steady_clock::now();
  execute_plan(build_plan(space, p), kernel, pool);
  const tuning::Seconds elapsed = std::chrono::steady_clock::now() - t0;
  tuner.record_timing(p, elapsed);
  if (log) {
    log->append({tuner.setup().key(), p, std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count(), phase,
                 p == tuner.best_params()});
  }
  return elapsed;
}

LoopRunner::LoopRunner(tuning::TopologyConfig topo, int n_workers)
    : tuner_(std::move(topo)),
      pool_(std::make_unique<WorkerPool>(n_workers > 0 ? n_workers
                                                       : tuner_.topology().n_coarse_threads *
                                                             tuner_.topology().n_fine_threads)) {}

tuning::LoopSetup LoopRunner::setup_for(const std::string& site_id, const IndexSpace& space) const {
  const auto& t = tuner_.topology();
  return {site_id, space.extents(), space.alignment, t.n_coarse_threads, t.n_fine_threads};
}

tuning::Seconds LoopRunner::run(const std::string& site_id, const IndexSpace& space, const RunKernel& kernel) {
  return run_loop(tuner_.state(setup_for(site_id, space)), space, kernel, *pool_, &log_);
}

} // namespace gridkit
