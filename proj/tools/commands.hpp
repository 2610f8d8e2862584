#ifndef GRIDKIT_TOOLS_COMMANDS_HPP
#define GRIDKIT_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridkit/tuner.hpp"

namespace gridkit::cli {

inline constexpr std::uint64_t default_seed = 20131117;

struct RunConfig {
  std::string subcommand;
  int dims = 0;  // 0: per-command default
  std::uint64_t seed = default_seed;
  int boxes = 30;
  std::int64_t extent = 0; // 0: per-command default
  int cases = 1000;
  int iters = 0; // 0: per-command default
  std::optional<int> threads;
  std::optional<int> fine_threads;
  std::optional<int> lane_width;
  std::string topology;
  std::string out;
  int seeds = 100;
  double noise = 0.02;
  int min_n = 64;
  int max_n = 4096;
};

/// Throws UsageError for out-of-range fields.
void validate(const RunConfig& cfg);

int cmd_setops_check(const RunConfig& cfg, std::ostream& out);
int cmd_setops_bench(const RunConfig& cfg, std::ostream& out);
int cmd_stencil_bench(const RunConfig& cfg, std::ostream& out);
int cmd_tune_sim(const RunConfig& cfg, std::ostream& out);

/// Parses argv and dispatches. Exit codes: 0 pass, 1 check failure, 2 usage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Pieces the commands are built from, shared with the acceptance checks.

struct BenchRow {
  std::string impl; // "tree" or "naive"
  int n = 0;
  double seconds = 0; // median per union
};

/// Union of n grid-placed disjoint boxes for n = min_n, 2 min_n, ... max_n.
std::vector<BenchRow> bench_union(int dims, int min_n, int max_n, int samples = 5);

/// Least-squares slope of log(seconds) against log(n) for one impl.
double loglog_slope(const std::vector<BenchRow>& rows, const std::string& impl);

struct StencilOutcome {
  bool naive_matches = false;
  bool tuned_matches = false;
  double serial_median = 0, naive_median = 0, tuned_median = 0; // over the last 20 iterations
};

/// 7-point Laplacian on an n^3 grid, three ways; per-iteration rows go to csv if non-null.
StencilOutcome stencil_compare(std::int64_t n, int iters, const tuning::TopologyConfig& topo, std::ostream* csv);

struct TuneSimSummary {
  int runs = 0;
  int within_10pct = 0;
  int worst_bad_streak = 0;
  double mean_regret = 0; // cumulative cost over (evaluations * optimum) minus 1
};

/// Tuner runs against seeded synthetic surfaces over an extent^dims loop.
TuneSimSummary tune_sim(int dims, std::int64_t extent, const tuning::TopologyConfig& topo, int seeds, int evals,
                        double noise, std::uint64_t seed, std::ostream* csv);

/// Topology file (or defaults) with the thread and lane flags applied on top.
tuning::TopologyConfig topology_for(const RunConfig& cfg);

} // namespace gridkit::cli

#endif // GRIDKIT_TOOLS_COMMANDS_HPP
