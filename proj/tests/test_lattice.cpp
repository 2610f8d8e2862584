#include <doctest.h>

#include <algorithm>
#include <random>

#include "gridkit/lattice.hpp"
#include "gridkit/oracle.hpp"
#include "gridkit/setgen.hpp"

using namespace gridkit;

namespace {

BBox box1(Coord lo, Coord hi, Coord s = 1) { return BBox(Point{lo}, Point{hi}, Stride(Point{s})); }

// Exhaustive membership of b over the hull [lo, hi]^d.
std::vector<Point> enumerate(const BBox& b, Coord lo, Coord hi) {
  std::vector<Point> out;
  const BBox hull(Point(b.dim(), lo), Point(b.dim(), hi));
  oracle::for_each_point(hull, [&](const Point& p) {
    if (bbox_contains(b, p)) out.push_back(p);
  });
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("bbox_contains") {
  CHECK(bbox_contains(box1(0, 4, 2), Point{2}));
  CHECK_FALSE(bbox_contains(box1(0, 4, 2), Point{1}));
  CHECK(bbox_contains(BBox(Point{0, 0}, Point{3, 1}), Point{3, 1}));
  CHECK_FALSE(bbox_contains(BBox::empty(2), Point{0, 0}));
  CHECK_THROWS_AS(bbox_contains(box1(0, 4), Point{1, 1}), UsageError);
}

TEST_CASE("bbox construction") {
  CHECK_THROWS_AS(BBox(Point{0}, Point{3}, Stride(Point{2})), UsageError);
  CHECK_THROWS_AS(Stride(Point{0, 1}), UsageError);
  CHECK_THROWS_AS(Point(5), UsageError);
  CHECK(BBox(Point{3}, Point{1}).is_empty());
  // empties are canonical across strides
  CHECK(BBox(Point{3}, Point{1}, Stride(Point{2})) == BBox::empty(1));
}

TEST_CASE("bbox_intersect") {
  const BBox a(Point{0, 0}, Point{3, 3});
  const BBox b(Point{2, 2}, Point{5, 5});
  CHECK(bbox_intersect(a, b) == BBox(Point{2, 2}, Point{3, 3}));
  CHECK(bbox_intersect(box1(0, 1), box1(4, 5)).is_empty());
  CHECK_THROWS_AS(bbox_intersect(box1(0, 4, 2), box1(1, 5, 2)), UsageError);
  CHECK_THROWS_AS(bbox_intersect(box1(0, 4, 2), box1(0, 4, 1)), UsageError);
  CHECK(bbox_intersect(box1(0, 4, 2), BBox::empty(1)).is_empty());
}

TEST_CASE("bbox_intersect against enumeration") {
  Rng rng(7);
  for (int dim = 1; dim <= 3; ++dim) {
    for (Coord s : {1, 2}) {
      BoxGenConfig cfg{dim, 8, Stride(Point(dim, s)), Point(dim, 1)};
      for (int k = 0; k < 200; ++k) {
        const BBox a = random_box(rng, cfg);
        const BBox b = random_box(rng, cfg);
        const BBox c = random_box(rng, cfg);
        const auto pa = enumerate(a, -1, 9);
        const auto pb = enumerate(b, -1, 9);
        std::vector<Point> both;
        std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(both));
        CHECK(enumerate(bbox_intersect(a, b), -1, 9) == both);
        CHECK(bbox_intersect(a, b) == bbox_intersect(b, a));
        CHECK(bbox_intersect(a, a) == a);
        CHECK(bbox_intersect(bbox_intersect(a, b), c) == bbox_intersect(a, bbox_intersect(b, c)));
        CHECK(bbox_point_count(a) == static_cast<Coord>(pa.size()));
      }
    }
  }
}

TEST_CASE("bbox_shift") {
  CHECK(bbox_shift(box1(0, 3), Point{2}) == box1(2, 5));
  const BBox b(Point{1, -2}, Point{5, 4}, Stride(Point{2, 3}));
  CHECK(bbox_shift(b, Point(2)) == b);
  CHECK(bbox_shift(bbox_shift(b, Point{3, 7}), Point{-3, -7}) == b);
  CHECK(bbox_shift(bbox_shift(b, Point{3, 7}), Point{1, 1}) == bbox_shift(b, Point{4, 8}));
  CHECK(bbox_shift(b, Point{1, 1}).stride() == b.stride());
}

TEST_CASE("bbox_expand") {
  CHECK(bbox_expand(box1(2, 5), Point{1}, Point{1}) == box1(1, 6));
  CHECK(bbox_expand(box1(2, 5), Point{0}, Point{0}) == box1(2, 5));
  CHECK(bbox_expand(box1(2, 3), Point{-2}, Point{0}).is_empty());
  CHECK(bbox_expand(box1(0, 4, 2), Point{1}, Point{2}) == box1(-2, 8, 2));
  const BBox b(Point{0, 0}, Point{6, 6}, Stride(Point{2, 3}));
  const Point lo{1, -1}, hi{-1, 2};
  CHECK(bbox_expand(bbox_expand(b, lo, hi), -lo, -hi) == b);
}

TEST_CASE("bbox_point_count") {
  CHECK(bbox_point_count(BBox(Point{0, 0}, Point{3, 1})) == 8);
  CHECK(bbox_point_count(BBox::empty(3)) == 0);
  CHECK(bbox_point_count(box1(0, 4, 2)) == 3);
  const Coord big = Coord{1} << 40;
  CHECK_THROWS_AS(bbox_point_count(BBox(Point{0, 0}, Point{big, big})), ResourceError);
}

TEST_CASE("to_physical") {
  CHECK(to_physical(GridGeometry({0, 0}, {0.5, 0.5}), Point{2, 4}) == std::vector<double>{1.0, 2.0});
  CHECK(to_physical(GridGeometry({3, -4}, {0.1, 2}), Point{0, 0}) == std::vector<double>{3, -4});
  CHECK(to_physical(GridGeometry({-1}, {0.25}), Point{4}) == std::vector<double>{0.0});
  CHECK_THROWS_AS(GridGeometry({0}, {0.0}), UsageError);
}

TEST_CASE("bbox text form") {
  const BBox b(Point{0, -3}, Point{4, 3}, Stride(Point{2, 3}));
  CHECK(to_string(b) == "([0:4:2],[-3:3:3])");
  CHECK(parse_bbox("([0:4:2],[-3:3:3])") == b);
  CHECK(parse_bbox(" ( [0:4:2] , [-3:3:3] ) ") == b);
  CHECK(to_string(BBox::empty(3)) == "(empty/3)");
  CHECK(parse_bbox("(empty/3)") == BBox::empty(3));
  CHECK_THROWS_AS(parse_bbox("([0:4])"), UsageError);
  CHECK_THROWS_AS(parse_bbox("([0:4:2]"), UsageError);
}
