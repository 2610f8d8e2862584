#include "gridkit/fuzz.hpp"

#include <random>
#include <sstream>

#include "gridkit/bboxset.hpp"
#include "gridkit/oracle.hpp"
#include "gridkit/setgen.hpp"

namespace gridkit::fuzz {

namespace {

using oracle::PointSet;

std::string dump(const BBoxSet& r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

bool disjoint_exact_canonical(const BBoxSet& r, const PointSet& expect) {
  const auto boxes = to_bboxes(r);
  Coord total = 0;
  for (const auto& b : boxes) total += bbox_point_count(b);
  if (total != static_cast<Coord>(expect.size())) return false; // overlap or wrong cover
  if (PointSet::from_boxes(r.dim(), boxes) != expect) return false;
  return to_bboxes(BBoxSet::from_bboxes(r.dim(), boxes)) == boxes;
}

} // namespace

std::optional<Mismatch> check_case(std::uint64_t seed, const FuzzConfig& cfg) {
  const int d = cfg.dim;
  Rng rng(seed);
  auto uni = [&](Coord lo, Coord hi) { return std::uniform_int_distribution<Coord>(lo, hi)(rng); };

  Point steps(d), anchor(d);
  for (int i = 0; i < d; ++i) {
    steps[i] = Coord{1} << uni(0, 2);
    anchor[i] = uni(0, steps[i] - 1);
  }
  const BoxGenConfig gen{d, cfg.hull, Stride(steps), anchor};
  const auto a = random_boxes(rng, gen, static_cast<int>(uni(0, cfg.max_boxes)));
  const auto b = random_boxes(rng, gen, static_cast<int>(uni(0, cfg.max_boxes)));
  const BBoxSet r = BBoxSet::from_bboxes(d, a), s = BBoxSet::from_bboxes(d, b);
  const PointSet pr = PointSet::from_boxes(d, a), ps = PointSet::from_boxes(d, b);

  auto fail = [&](const char* op) { return Mismatch{seed, op, dump(r), dump(s)}; };
  auto pts = [](const BBoxSet& x) { return oracle::oracle_from_bboxset(x); };

  if (pts(r) != pr || pts(s) != ps) return fail("from_bboxes");
  for (SetOp op : {SetOp::union_, SetOp::intersection, SetOp::difference, SetOp::symmetric_difference}) {
    if (pts(apply_binary(op, r, s)) != oracle::oracle_op(op, pr, ps)) return fail(to_string(op));
  }

  Point v(d), lo(d), hi(d), coarse(d), fine(d);
  for (int i = 0; i < d; ++i) {
    v[i] = uni(-5, 5);
    lo[i] = uni(0, 2);
    hi[i] = uni(0, 2);
    coarse[i] = uni(1, 3);
    fine[i] = Coord{1} << uni(0, 2);
    while (r.stride()[i] % fine[i] != 0) fine[i] /= 2;
  }
  if (pts(shift(r, v)) != oracle::translate(pr, v)) return fail("shift");
  if (pts(expand(r, lo, hi)) != oracle::dilate(pr, lo, hi)) return fail("expand");
  if (!r.is_empty() && pts(coarsen(r, Stride(coarse))) != oracle::coarsen(pr, Stride(coarse))) return fail("coarsen");
  if (pts(refine(r, Stride(fine))) != oracle::refine(pr, Stride(fine))) return fail("refine");
  if (!disjoint_exact_canonical(r, pr)) return fail("to_bboxes");
  if (!disjoint_exact_canonical(r ^ s, oracle::oracle_op(SetOp::symmetric_difference, pr, ps))) {
    return fail("to_bboxes");
  }
  return std::nullopt;
}

} // namespace gridkit::fuzz
