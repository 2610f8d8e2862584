#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "gridkit/stencil.hpp"
#include "gridkit/vlanes.hpp"

using namespace gridkit;
using namespace gridkit::lanes;

namespace {

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

LaneVector lv(std::initializer_list<double> v) { return LaneVector::from_lanes(std::vector<double>(v)); }

bool same(const LaneVector& a, const LaneVector& b) {
  if (a.width() != b.width()) return false;
  for (int l = 0; l < a.width(); ++l) {
    if (bits(a[l]) != bits(b[l])) return false;
  }
  return true;
}

AlignedArray ramp(std::size_t n, std::size_t pad, double scale = 1.0) {
  AlignedArray a(n, pad);
  for (Index i = 0; i < static_cast<Index>(n); ++i) a[i] = scale * static_cast<double>(i * i % 17) + 0.125 * i;
  return a;
}

} // namespace

TEST_CASE("lane width validation") {
  for (int w : {1, 2, 4, 8, 16}) CHECK(LaneConfig(w).width == w);
  CHECK_THROWS_AS(LaneConfig(3), UsageError);
  CHECK_THROWS_AS(LaneConfig(0), UsageError);
  CHECK_THROWS_AS(LaneConfig(32), UsageError);
}

TEST_CASE("arithmetic examples") {
  CHECK(same(vfma(lv({1, 2}), lv({3, 4}), lv({5, 6})), lv({8, 14})));
  CHECK(same(lv({1, 2, 3, 4}) + lv({4, 3, 2, 1}), lv({5, 5, 5, 5})));
  CHECK(same(lv({1, 2}) / lv({2, 8}), lv({0.5, 0.25})));
  CHECK(vcmp(CmpOp::lt, lv({1, 5, 3, 0}), lv({2, 2, 3, 1})) == LaneMask::from_lanes({true, false, false, true}));
  CHECK(same(ifthen(LaneMask::from_lanes({true, false}), lv({1, 2}), lv({9, 8})), lv({1, 8})));
  CHECK(same(vmath(MathFn::sqrt, lv({4, 9})), lv({2, 3})));
  CHECK(same(vmath(MathFn::exp, lv({0, 1})), lv({1, std::exp(1.0)})));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(visnan(lv({nan, 1.0})) == LaneMask::from_lanes({true, false}));
  CHECK(vsignbit(lv({-0.0, 0.0})) == LaneMask::from_lanes({true, false}));
  CHECK(same(vcopysign(lv({2, 3}), lv({-1, 1})), lv({-2, 3})));
  CHECK_THROWS_AS(lv({1, 2}) + lv({1, 2, 3, 4}), UsageError);
}

TEST_CASE("lanes match scalar operations") {
  const LaneVector x = lv({0.1, -2.5, 1e300, 3.0});
  const LaneVector y = lv({0.7, 4.0, 1e10, -0.0});
  const LaneVector z = lv({1.0 / 3, 2.0, -1e300, 5.5});
  const LaneVector f = vfma(x, y, z);
  for (int l = 0; l < 4; ++l) {
    const double expect = scalar_fma(x[l], y[l], z[l]);
    CHECK(bits(f[l]) == bits(expect));
  }
#if !GRIDKIT_FUSED_FMA
  // two roundings: 0.1 * 0.7 + 1/3 computed stepwise
  volatile double p = 0.1 * 0.7;
  CHECK(f[0] == p + 1.0 / 3);
#endif
}

TEST_CASE("loads and stores") {
  const LaneConfig cfg(4);
  AlignedArray a(8, 4);
  for (Index i = 0; i < 8; ++i) a[i] = static_cast<double>(i);
  CHECK(same(vload_aligned(cfg, a, 4), lv({4, 5, 6, 7})));
  CHECK(same(vload_off(cfg, +1, a, 1), lv({1, 2, 3, 4})));
  CHECK(same(vload_unaligned(cfg, a, 3), lv({3, 4, 5, 6})));
  CHECK_THROWS_AS(vload_aligned(cfg, a, 2), ContractViolation);
  CHECK_THROWS_AS(vload_off(cfg, +1, a, 2), ContractViolation);
  CHECK_THROWS_AS(vload_unaligned(cfg, a, 9), BoundsError);
  CHECK_THROWS_AS(vload_unaligned(cfg, a, -5), BoundsError);
  CHECK_THROWS_AS(a.at(12), BoundsError);

  AlignedArray out(8, 4);
  vstore_partial(cfg, out, 0, lv({9, 9, 9, 9}), LaneMask::from_lanes({false, true, true, false}));
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 9.0);
  CHECK(out[2] == 9.0);
  CHECK(out[3] == 0.0);
  vstore_aligned(cfg, out, 4, lv({1, 2, 3, 4}));
  CHECK(out[7] == 4.0);
  CHECK_THROWS_AS(vstore_aligned(cfg, out, 1, lv({1, 2, 3, 4})), ContractViolation);

  // alignment checks can be switched off
  const LaneConfig loose(4, false);
  CHECK(same(vload_aligned(loose, a, 2), lv({2, 3, 4, 5})));
}

TEST_CASE("base alignment shifts the vector grid") {
  const LaneConfig cfg(4);
  AlignedArray a(8, 4, 1); // element 0 is one past a boundary
  CHECK_NOTHROW(vload_aligned(cfg, a, 3));
  CHECK_THROWS_AS(vload_aligned(cfg, a, 0), ContractViolation);
}

TEST_CASE("iterate_masked examples") {
  const LaneConfig w4(4);
  std::vector<MaskedStep> steps;
  for (auto s : iterate_masked(w4, 1, 7)) steps.push_back(s);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].i == 0);
  CHECK(steps[0].mask == LaneMask::from_lanes({false, true, true, true}));
  CHECK(steps[1].i == 4);
  CHECK(steps[1].mask == LaneMask::from_lanes({true, true, true, false}));

  steps.clear();
  for (auto s : iterate_masked(w4, 0, 8)) steps.push_back(s);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].mask.all());
  CHECK(steps[1].mask.all());

  int n = 0;
  for ([[maybe_unused]] auto s : iterate_masked(w4, 5, 5)) ++n;
  CHECK(n == 0);
  CHECK_THROWS_AS(iterate_masked(w4, 3, 2), UsageError);

  // negative starts round down
  steps.clear();
  for (auto s : iterate_masked(w4, -3, 1)) steps.push_back(s);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].i == -4);
  CHECK(steps[0].mask == LaneMask::from_lanes({false, true, true, true}));
  CHECK(steps[1].mask == LaneMask::from_lanes({true, false, false, false}));
}

TEST_CASE("iterate_masked covers each index once") {
  for (int w : {1, 2, 4, 8, 16}) {
    const LaneConfig cfg(w);
    for (Index lo = 0; lo <= 40; ++lo) {
      for (Index hi = lo; hi <= 40; ++hi) {
        std::vector<int> hits(64, 0);
        Index prev = lo - 2 * w;
        bool aligned = true, head_tail_only = true, no_empty = true;
        for (auto [i, m] : iterate_masked(cfg, lo, hi)) {
          aligned = aligned && i % w == 0 && i > prev;
          prev = i;
          no_empty = no_empty && !m.none();
          if (!m.all() && i > lo && i + w < hi) head_tail_only = false;
          for (int l = 0; l < w; ++l) {
            if (m[l]) ++hits[static_cast<std::size_t>(i + l)];
          }
        }
        bool exact = true;
        for (Index k = 0; k < 64; ++k) exact = exact && hits[static_cast<std::size_t>(k)] == (k >= lo && k < hi ? 1 : 0);
        CHECK(exact);
        CHECK(aligned);
        CHECK(no_empty);
        CHECK(head_tail_only);
      }
    }
  }
}

TEST_CASE("width 1 degenerates to the scalar loop") {
  const LaneConfig cfg(1);
  std::vector<Index> seen;
  for (auto [i, m] : iterate_masked(cfg, 3, 7)) {
    CHECK(m.all());
    seen.push_back(i);
  }
  CHECK(seen == std::vector<Index>{3, 4, 5, 6});
}

TEST_CASE("difference kernels match the scalar loops bit for bit") {
  for (int w : {1, 2, 4, 8, 16}) {
    const LaneConfig cfg(w);
    for (std::size_t n = 1; n <= 129; ++n) {
      const AlignedArray b = ramp(n, static_cast<std::size_t>(w), 0.37);
      AlignedArray ref(n, static_cast<std::size_t>(w)), vec(n, static_cast<std::size_t>(w));
      stencil::forward_diff_scalar(b, ref);
      stencil::forward_diff_lanes(cfg, b, vec);
      CHECK(std::memcmp(ref.logical().data(), vec.logical().data(), n * sizeof(double)) == 0);

      AlignedArray ref2(n, static_cast<std::size_t>(w)), vec2(n, static_cast<std::size_t>(w));
      stencil::centered_diff_scalar(b, ref2);
      stencil::centered_diff_lanes(cfg, b, vec2);
      CHECK(std::memcmp(ref2.logical().data(), vec2.logical().data(), n * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("masked stores leave the frame alone") {
  const LaneConfig cfg(8);
  const std::size_t n = 21;
  const AlignedArray b = ramp(n, 8);
  AlignedArray a(n, 8);
  for (Index i = -8; i < static_cast<Index>(n) + 8; ++i) a[i] = -7.0;
  stencil::centered_diff_lanes(cfg, b, a);
  for (Index i = -8; i < static_cast<Index>(n) + 8; ++i) {
    if (i < 1 || i >= static_cast<Index>(n) - 1) CHECK(a[i] == -7.0);
  }
}

TEST_CASE("under-padded arrays are rejected") {
  const LaneConfig cfg(8);
  const AlignedArray b = ramp(10, 0);
  AlignedArray a(10, 0);
  CHECK_THROWS_AS(stencil::centered_diff_lanes(cfg, b, a), BoundsError);
}
