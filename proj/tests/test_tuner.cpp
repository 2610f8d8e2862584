#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "gridkit/synthetic_surface.hpp"
#include "gridkit/tuner.hpp"

using namespace gridkit;
using namespace gridkit::tuning;

namespace {

TopologyConfig topo4() {
  TopologyConfig t;
  t.cache_size_bytes = 256 * 1024;
  t.n_coarse_threads = 4;
  t.lane_width = 4;
  return t;
}

LoopSetup cube64() { return {"site", Point{64, 64, 64}, AlignmentClass::none, 4, 1}; }

// Drive the tuner with a cost function; returns the executed params.
template <class Cost>
std::vector<ExecParams> drive(SetupTuner& t, int n, Cost cost) {
  std::vector<ExecParams> out;
  for (int k = 0; k < n; ++k) {
    const ExecParams p = t.next_params();
    t.record_timing(p, Seconds(cost(p)));
    out.push_back(p);
  }
  return out;
}

} // namespace

TEST_CASE("config file") {
  const auto c = TopologyConfig::parse("# machine\ncache_size_bytes = 1048576\nlane_width=8\n p_restart = 0.1 \n"
                                       "n_coarse_threads=2\nrng_seed=99\n");
  CHECK(c.cache_size_bytes == 1048576);
  CHECK(c.lane_width == 8);
  CHECK(c.p_restart == 0.1);
  CHECK(c.n_coarse_threads == 2);
  CHECK(c.rng_seed == 99);
  CHECK(c.abort_factor == 1.5);
  CHECK_THROWS_AS(TopologyConfig::parse("bogus = 1\n"), UsageError);
  CHECK_THROWS_AS(TopologyConfig::parse("lane_width = 3\n"), UsageError);
  CHECK_THROWS_AS(TopologyConfig::parse("lane_width = four\n"), UsageError);
  CHECK_THROWS_AS(TopologyConfig::parse("lane_width\n"), UsageError);
}

TEST_CASE("params_initial") {
  const auto topo = topo4();
  const auto p = params_initial(cube64(), topo);
  CHECK(check_params(p, cube64(), topo).empty());
  CHECK(p.coarse_split.product() == 4);
  CHECK(p.tile[0] >= 2 * topo.lane_width);
  Coord bytes = topo.bytes_per_point;
  for (int i = 0; i < 3; ++i) bytes *= p.tile[i];
  CHECK(2 * bytes <= topo.cache_size_bytes);
  CHECK(params_initial(cube64(), topo) == p);

  TopologyConfig one;
  const LoopSetup small{"s", Point{8}, AlignmentClass::none, 1, 1};
  const auto q = params_initial(small, one);
  CHECK(q.coarse_split == Point{1});
  CHECK(q.tile == Point{8});

  // narrower than a vector: one whole-extent tile
  const LoopSetup narrow{"n", Point{3, 5}, AlignmentClass::none, 1, 1};
  const auto r = params_initial(narrow, one);
  CHECK(r.tile[0] == one.lane_width);
  CHECK(check_params(r, narrow, one).empty());

  // cache-line alignment forces whole lines in dimension 0
  const LoopSetup lined{"l", Point{100, 10}, AlignmentClass::cache_line, 1, 1};
  const auto s = params_initial(lined, one);
  CHECK(s.tile[0] % 8 == 0);
  CHECK(check_params(s, lined, one).empty());
}

TEST_CASE("neighbors") {
  const auto topo = topo4();
  const auto setup = cube64();
  ExecParams p{Point{1, 1, 4}, Point{8, 8, 8}, Point{1, 1, 1}, 4};
  const auto n = neighbors(p, setup, topo);
  auto has = [&](const Point& t) {
    return std::any_of(n.begin(), n.end(), [&](const ExecParams& q) { return q.tile == t && q.coarse_split == p.coarse_split; });
  };
  CHECK(has(Point{4, 8, 8}));
  CHECK(has(Point{16, 8, 8}));
  CHECK(std::find(n.begin(), n.end(), p) == n.end());
  CHECK(std::set<ExecParams>(n.begin(), n.end()).size() == n.size());
  for (const auto& q : n) CHECK(check_params(q, setup, topo).empty());

  ExecParams at_min{Point{1, 1, 4}, Point{4, 1, 8}, Point{1, 1, 1}, 4};
  for (const auto& q : neighbors(at_min, setup, topo)) {
    CHECK(q.tile[0] >= 4);
    CHECK(q.tile[1] >= 1);
  }
}

TEST_CASE("neighbor relation is symmetric") {
  TopologyConfig topo;
  topo.n_coarse_threads = 4;
  topo.n_fine_threads = 2;
  const LoopSetup setup{"sym", Point{16, 8}, AlignmentClass::none, 4, 2};
  const auto space = all_params(setup, topo);
  CHECK(space.size() == 3 * 4 * 3 * 2);
  for (const auto& p : space) {
    CHECK(check_params(p, setup, topo).empty());
    for (const auto& q : neighbors(p, setup, topo)) {
      const auto back = neighbors(q, setup, topo);
      CHECK(std::find(back.begin(), back.end(), p) != back.end());
    }
  }
}

TEST_CASE("thread_splits") {
  CHECK(thread_splits(4, 2) == std::vector<Point>{Point{1, 4}, Point{2, 2}, Point{4, 1}});
  CHECK(thread_splits(1, 3).size() == 1);
  CHECK(thread_splits(12, 3).size() == 18);
}

TEST_CASE("record_timing") {
  TopologyConfig topo;
  topo.discard_warmup = false;
  SetupTuner t({"r", Point{32}, AlignmentClass::none, 1, 1}, topo);
  const ExecParams p = t.next_params();
  t.record_timing(p, Seconds(2.0));
  CHECK(t.median(p) == 2.0);
  CHECK(t.best_params() == p);
  CHECK(t.best_time() == 2.0);
  for (int k = 0; k < 6; ++k) t.record_timing(p, Seconds(2.0));
  CHECK(t.median(p) == 2.0);
  // window of five: three slow samples move the median
  for (int k = 0; k < 3; ++k) t.record_timing(p, Seconds(5.0));
  CHECK(t.median(p) == 5.0);
  CHECK(t.best_time() == 2.0);

  ExecParams q = p;
  q.tile[0] = 16;
  t.record_timing(q, Seconds(1.0));
  CHECK(t.best_params() == q);
  CHECK_THROWS_AS(t.record_timing(p, Seconds(-1.0)), UsageError);
  CHECK_THROWS_AS(t.record_timing(p, Seconds(std::numeric_limits<double>::infinity())), UsageError);
  CHECK_THROWS_AS(t.record_timing(p, Seconds(std::nan(""))), UsageError);
}

TEST_CASE("warm-up sample is discarded") {
  SetupTuner t({"w", Point{32}, AlignmentClass::none, 1, 1}, TopologyConfig{});
  const ExecParams p = t.next_params();
  t.record_timing(p, Seconds(100.0));
  CHECK(t.sample_count(p) == 0);
  CHECK(t.next_params() == p);
  t.record_timing(p, Seconds(1.0));
  CHECK(t.median(p) == 1.0);
}

TEST_CASE("should_abort_excursion") {
  TopologyConfig topo;
  topo.discard_warmup = false;
  SetupTuner t({"a", Point{32}, AlignmentClass::none, 1, 1}, topo);
  t.record_timing(t.next_params(), Seconds(1.0));
  CHECK(t.should_abort_excursion(Seconds(2.0)));
  CHECK_FALSE(t.should_abort_excursion(Seconds(1.0)));
  CHECK_FALSE(t.should_abort_excursion(Seconds(1.5)));
}

TEST_CASE("climbing moves to a better neighbour") {
  TopologyConfig topo;
  topo.discard_warmup = false;
  topo.p_restart = 0.0;
  const LoopSetup setup{"c", Point{64}, AlignmentClass::none, 1, 1};
  SetupTuner t(setup, topo);
  // cost falls with tile size: the climb must end at the largest tile
  auto cost = [](const ExecParams& p) { return 1.0 / static_cast<double>(p.tile[0]); };
  drive(t, 30, cost);
  CHECK(t.best_params().tile[0] == 64);
  CHECK(t.phase() == Phase::climbing);
  // all neighbours worse and no restart: stay at best
  for (int k = 0; k < 5; ++k) {
    const auto p = t.next_params();
    CHECK(p == t.best_params());
    t.record_timing(p, Seconds(cost(p)));
  }
}

TEST_CASE("best time never increases") {
  const auto topo = topo4();
  const auto setup = cube64();
  SyntheticSurface s(setup, topo, 3, 0.05);
  SetupTuner t(setup, topo);
  std::mt19937_64 rng(1);
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 300; ++k) {
    const auto p = t.next_params();
    CHECK(check_params(p, setup, topo).empty());
    t.record_timing(p, Seconds(s.sample(p, rng)));
    CHECK(t.best_time() <= last);
    last = t.best_time();
  }
}

TEST_CASE("deterministic per seed, isolated per setup") {
  const auto topo = topo4();
  const auto setup = cube64();
  SyntheticSurface s(setup, topo, 11, 0.02);
  const auto a = simulate_tuning(s, setup, topo, 5, 120);
  const auto b = simulate_tuning(s, setup, topo, 5, 120);
  CHECK(a.executed == b.executed);
  CHECK(a.sampled == b.sampled);

  Tuner tuner(topo);
  LoopSetup other = setup;
  other.site_id = "other";
  SetupTuner& x = tuner.state(setup);
  SetupTuner& y = tuner.state(other);
  const auto y_before = y.next_params();
  drive(x, 40, [&](const ExecParams& p) { return s.cost(p); });
  CHECK(y.next_params() == y_before);
  CHECK(y.sample_count(y_before) == 0);
  CHECK(tuner.setup_count() == 2);
  CHECK(&tuner.state(setup) == &x);
}

TEST_CASE("excursions to terrible points are cut after one sample") {
  TopologyConfig topo = topo4();
  topo.p_restart = 1.0; // restart at every local optimum
  const auto setup = cube64();
  const ExecParams good = params_initial(setup, topo);
  // everything except the initial point is ten times slower
  auto cost = [&](const ExecParams& p) { return p == good ? 1.0 : 10.0; };
  SetupTuner t(setup, topo);
  const auto seq = drive(t, 400, cost);
  int streak = 0, worst = 0, excursions = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const bool bad = cost(seq[k]) > 1.5;
    streak = bad ? (k > 0 && seq[k - 1] == seq[k] ? streak + 1 : 1) : 0;
    worst = std::max(worst, streak);
    if (bad && (k == 0 || !(cost(seq[k - 1]) > 1.5))) ++excursions;
  }
  CHECK(worst == 1);
  CHECK(excursions > 50);
  CHECK(t.best_params() == good);
  // every bad sample is immediately followed by the best params
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    if (cost(seq[k]) > 1.5 && k > 0 && seq[k - 1] == good) CHECK(seq[k + 1] == good);
  }
}

TEST_CASE("excursion that finds something better is kept") {
  TopologyConfig topo;
  topo.p_restart = 1.0;
  topo.discard_warmup = false;
  const LoopSetup setup{"e", Point{64, 64}, AlignmentClass::none, 1, 1};
  const ExecParams start = params_initial(setup, topo);
  // the start is a strict local optimum; a distant point is much better
  auto cost = [&](const ExecParams& p) {
    if (p == start) return 1.0;
    if (p.tile == Point{4, 1}) return 0.2;
    return 1.2;
  };
  SetupTuner t(setup, topo);
  drive(t, 2000, cost);
  CHECK(t.best_params().tile == Point{4, 1});
  CHECK(t.best_time() == 0.2);
}

TEST_CASE("synthetic surface") {
  const auto topo = topo4();
  const auto setup = cube64();
  SyntheticSurface s(setup, topo, 1);
  double exhaustive = std::numeric_limits<double>::infinity();
  for (const auto& p : all_params(setup, topo)) exhaustive = std::min(exhaustive, s.cost(p));
  CHECK(s.optimum_cost() == exhaustive);
  CHECK(s.cost(s.decoy()) == doctest::Approx(1.3 * s.optimum_cost()));
  for (const auto& n : neighbors(s.decoy(), setup, topo)) CHECK(s.cost(n) > s.cost(s.decoy()));
  CHECK(s.decoy() != s.optimum());
}

TEST_CASE("tuner reaches the optimum region of the synthetic surface") {
  const auto topo = topo4();
  const auto setup = cube64();
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SyntheticSurface s(setup, topo, seed, 0.02);
    const auto trace = simulate_tuning(s, setup, topo, seed + 7, 50);
    if (trace.best_cost.back() <= 1.1 * s.optimum_cost()) ++hits;
    CHECK(trace.max_bad_streak <= 1);
  }
  CHECK(hits >= 36);
}

TEST_CASE("execution log csv") {
  ExecutionLog log;
  log.append({"k", ExecParams{Point{2, 1}, Point{8, 4}, Point{1, 1}, 4}, 1234, Phase::climbing, true});
  std::ostringstream os;
  log.write_csv(os);
  CHECK(os.str() == "setup_id,coarse_split,tile,fine_split,vector_width,elapsed_ns,phase,is_best\n"
                    "k,2x1,8x4,1x1,4,1234,climbing,1\n");
}
