#include <doctest.h>

#include <utility>

#include "gridkit/stencil.hpp"

using namespace gridkit;
using namespace gridkit::stencil;

namespace {

tuning::TopologyConfig topo(int coarse, int fine, int w) {
  tuning::TopologyConfig t;
  t.n_coarse_threads = coarse;
  t.n_fine_threads = fine;
  t.lane_width = w;
  t.cache_size_bytes = 32 * 1024;
  return t;
}

// Iterate u <- step(u) and return the final grid.
template <class Step>
Grid3 iterate(const Point& n, int iters, Step step) {
  Grid3 a(n), b(n);
  fill_random(a, 42);
  fill_random(b, 42);
  for (int k = 0; k < iters; ++k) {
    step(a, b);
    std::swap(a, b);
  }
  return a;
}

} // namespace

TEST_CASE("grid layout") {
  Grid3 g(Point{5, 3, 2});
  CHECK(g.pitch() == 16);
  CHECK(g.row(1, 1) == 16 * 4);
  g(4, 2, 1) = 3.5;
  CHECK(g.data()[g.row(2, 1) + 4] == 3.5);
  CHECK_THROWS_AS(Grid3(Point{0, 1, 1}), UsageError);
  CHECK_THROWS_AS(Grid3(Point{1, 1}), UsageError);
  CHECK(interior(g).lo == Point{1, 1, 1});
  CHECK(interior(g).hi == Point{4, 2, 1});
}

TEST_CASE("single step against a hand-computed point") {
  Grid3 in(Point{3, 3, 3}), out(Point{3, 3, 3});
  in(1, 1, 1) = 1.0;
  in(0, 1, 1) = 2.0;
  laplacian_serial(in, out, 0.1);
  // lap = 2 - 6 = -4, out = 0.1 * -4 + 1
  CHECK(out(1, 1, 1) == 0.1 * -4.0 + 1.0);
  CHECK(out(0, 1, 1) == 0.0);
}

TEST_CASE("serial, naive and tuned agree bit for bit") {
  const double c = 0.1;
  for (const Point& n : {Point{3, 3, 3}, Point{9, 5, 4}, Point{18, 7, 6}, Point{33, 10, 9}}) {
    const Grid3 ref = iterate(n, 6, [&](const Grid3& in, Grid3& out) { laplacian_serial(in, out, c); });
    for (int workers : {1, 2, 4}) {
      WorkerPool pool(workers);
      const Grid3 naive = iterate(n, 6, [&](const Grid3& in, Grid3& out) { laplacian_naive(in, out, c, pool); });
      CHECK(same_bits(ref, naive));
    }
    for (int w : {1, 2, 4, 8, 16}) {
      LoopRunner runner(topo(2, w == 4 ? 2 : 1, w));
      const Grid3 tuned = iterate(n, 6, [&](const Grid3& in, Grid3& out) { laplacian_tuned(in, out, c, runner); });
      INFO("W=" << w << " n=" << n);
      CHECK(same_bits(ref, tuned));
    }
  }
}

TEST_CASE("same_bits notices a single flipped value") {
  Grid3 a(Point{4, 4, 4}), b(Point{4, 4, 4});
  fill_random(a, 1);
  fill_random(b, 1);
  CHECK(same_bits(a, b));
  b(3, 3, 3) = -b(3, 3, 3);
  CHECK_FALSE(same_bits(a, b));
}
