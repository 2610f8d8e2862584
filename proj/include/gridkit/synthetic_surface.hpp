#ifndef GRIDKIT_SYNTHETIC_SURFACE_HPP
#define GRIDKIT_SYNTHETIC_SURFACE_HPP

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "gridkit/tuner.hpp"

namespace gridkit::tuning {

/**
 * Seeded stand-in for wall-clock timings over the parameter space of one
 * loop setup.
 *
 * cost = scale * bowl * cliff, where the bowl is separable and quadratic
 * in log2 tile size around a hidden optimum plus an L1 term over the
 * thread-split exponents, and the cliff multiplies by 3 once a tile's
 * working set exceeds the cache and by a further 2 past 4x the cache.
 * One far-away parameter vector is pinned at 1.3x the optimum cost with
 * every neighbour strictly above that, making it a deceptive local
 * optimum.
 */
class SyntheticSurface {
public:
  SyntheticSurface(const LoopSetup& setup, const TopologyConfig& topo, std::uint64_t seed, double noise = 0.0);

  /// Noise-free cost in seconds.
  double cost(const ExecParams& p) const;
  /// cost(p) times a uniform factor in [1 - noise, 1 + noise].
  double sample(const ExecParams& p, std::mt19937_64& rng) const;

  double optimum_cost() const { return optimum_cost_; }
  const ExecParams& optimum() const { return optimum_; }
  const ExecParams& decoy() const { return decoy_; }
  const std::vector<ExecParams>& space() const { return space_; }

private:
  double natural_cost(const ExecParams& p) const;

  LoopSetup setup_;
  TopologyConfig topo_;
  double noise_;
  std::vector<double> weight_;
  std::vector<double> center_;
  Point coarse_pref_;
  Point fine_pref_;
  ExecParams decoy_;
  double decoy_cost_ = 0.0;
  std::vector<ExecParams> space_;
  ExecParams optimum_;
  double optimum_cost_ = 0.0;
};

/// One simulated tuning run against a surface.
struct SimTrace {
  std::vector<ExecParams> executed;
  std::vector<double> sampled;   // what the tuner was told
  std::vector<Phase> phase;      // phase when the params were issued
  std::vector<double> best_cost; // noise-free cost of the tuner's best after each execution
  /// Longest run of consecutive executions of one config whose sample
  /// exceeded abort_factor times the best time known before it.
  int max_bad_streak = 0;
};

/// Drives a fresh SetupTuner for `executions` loop executions (the
/// warm-up one included). Deterministic in (surface, topo, seed).
SimTrace simulate_tuning(const SyntheticSurface& surface, const LoopSetup& setup, const TopologyConfig& topo,
                         std::uint64_t noise_seed, int executions);

} // namespace gridkit::tuning

#endif // GRIDKIT_SYNTHETIC_SURFACE_HPP
