#include "gridkit/synthetic_surface.hpp"

#include <cmath>

namespace gridkit::tuning {

namespace {

constexpr double time_scale = 1e-3;
constexpr double decoy_ratio = 1.3;

double log2c(Coord v) { return std::log2(static_cast<double>(v)); }

double split_distance(const Point& a, const Point& b) {
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) s += std::fabs(log2c(a[i]) - log2c(b[i]));
  return s;
}

} // namespace

SyntheticSurface::SyntheticSurface(const LoopSetup& setup, const TopologyConfig& topo, std::uint64_t seed,
                                   double noise)
    : setup_(setup), topo_(topo), noise_(noise), space_(all_params(setup, topo)) {
  if (!(noise >= 0.0 && noise < 1.0)) throw UsageError("noise must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  const int d = setup.dim();
  std::uniform_real_distribution<double> w(0.05, 0.3);
  for (int i = 0; i < d; ++i) weight_.push_back(w(rng));

  // hidden optimum: a tile vector whose working set fits the cache
  for (;;) {
    const ExecParams& q = space_[std::uniform_int_distribution<std::size_t>(0, space_.size() - 1)(rng)];
    Coord bytes = topo.bytes_per_point;
    for (int i = 0; i < d; ++i) bytes *= std::min(q.tile[i], setup.extents[i]);
    if (bytes > topo.cache_size_bytes) continue;
    center_.clear();
    for (int i = 0; i < d; ++i) center_.push_back(log2c(q.tile[i]));
    coarse_pref_ = q.coarse_split;
    fine_pref_ = q.fine_split;
    break;
  }

  // decoy: a far point, pinned at 1.3x the optimum, whose neighbours all cost more
  double best = natural_cost(space_.front());
  for (const auto& q : space_) best = std::min(best, natural_cost(q));
  decoy_cost_ = decoy_ratio * best;
  std::vector<ExecParams> candidates;
  for (const auto& q : space_) {
    if (natural_cost(q) < 2.0 * best) continue;
    bool isolated = true;
    for (const auto& n : neighbors(q, setup, topo)) isolated = isolated && natural_cost(n) > decoy_cost_;
    if (isolated) candidates.push_back(q);
  }
  decoy_ = candidates.empty() ? space_.front() : candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  if (candidates.empty()) decoy_cost_ = natural_cost(decoy_);

  optimum_ = space_.front();
  optimum_cost_ = cost(optimum_);
  for (const auto& q : space_) {
    if (const double c = cost(q); c < optimum_cost_) {
      optimum_cost_ = c;
      optimum_ = q;
    }
  }
}

double SyntheticSurface::natural_cost(const ExecParams& p) const {
  const int d = setup_.dim();
  double bowl = 1.0;
  Coord bytes = topo_.bytes_per_point;
  for (int i = 0; i < d; ++i) {
    const double x = log2c(p.tile[i]) - center_[static_cast<std::size_t>(i)];
    bowl += weight_[static_cast<std::size_t>(i)] * x * x;
    bytes *= std::min(p.tile[i], setup_.extents[i]);
  }
  bowl += 0.1 * split_distance(p.coarse_split, coarse_pref_) + 0.05 * split_distance(p.fine_split, fine_pref_);
  double cliff = 1.0;
  if (bytes > topo_.cache_size_bytes) cliff *= 3.0;
  if (bytes > 4 * topo_.cache_size_bytes) cliff *= 2.0;
  return time_scale * bowl * cliff;
}

double SyntheticSurface::cost(const ExecParams& p) const {
  if (p == decoy_) return decoy_cost_;
  return natural_cost(p);
}

double SyntheticSurface::sample(const ExecParams& p, std::mt19937_64& rng) const {
  const double c = cost(p);
  if (noise_ == 0.0) return c;
  return c * std::uniform_real_distribution<double>(1.0 - noise_, 1.0 + noise_)(rng);
}

SimTrace simulate_tuning(const SyntheticSurface& surface, const LoopSetup& setup, const TopologyConfig& topo,
                         std::uint64_t noise_seed, int executions) {
  SetupTuner tuner(setup, topo);
  std::mt19937_64 rng(noise_seed);
  SimTrace t;
  int streak = 0;
  for (int k = 0; k < executions; ++k) {
    const double best_before = tuner.best_time();
    const Phase phase = tuner.phase();
    const ExecParams p = tuner.next_params();
    const double s = surface.sample(p, rng);
    const bool bad = s > topo.abort_factor * best_before;
    streak = bad ? (!t.executed.empty() && t.executed.back() == p && streak > 0 ? streak + 1 : 1) : 0;
    t.max_bad_streak = std::max(t.max_bad_streak, streak);
    tuner.record_timing(p, Seconds(s));
    t.executed.push_back(p);
    t.sampled.push_back(s);
    t.phase.push_back(phase == Phase::initial ? Phase::initial : tuner.phase());
    t.best_cost.push_back(surface.cost(tuner.best_params()));
  }
  return t;
}

} // namespace gridkit::tuning
