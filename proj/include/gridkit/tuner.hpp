#ifndef GRIDKIT_TUNER_HPP
#define GRIDKIT_TUNER_HPP

#include <chrono>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gridkit/lattice.hpp"

namespace gridkit::tuning {

using Seconds = std::chrono::duration<double>;

/// Declared alignment of the arrays a loop touches.
enum class AlignmentClass { none, vector, cache_line };

const char* to_string(AlignmentClass a);
AlignmentClass parse_alignment(std::string_view s);

/**
 * Machine description and tuner constants, read from a key = value
 * text file. Unknown keys are rejected.
 */
struct TopologyConfig {
  std::int64_t cache_size_bytes = 256 * 1024;
  int cache_line_bytes = 64;
  int n_coarse_threads = 1;
  int n_fine_threads = 1;
  int lane_width = 4;
  double p_restart = 0.05;
  double abort_factor = 1.5;
  std::uint64_t rng_seed = 12345;
  int median_window = 5;
  bool discard_warmup = true;
  /// Working-set bytes per index-space point used by the tile heuristic.
  int bytes_per_point = 16;

  static TopologyConfig parse(std::string_view text);
  static TopologyConfig load(const std::string& path);
  void validate() const;
  /// Tile granularity of dimension 0 for the given alignment class.
  Coord inner_unit(AlignmentClass a) const;
};

/// Identity of a loop for tuning purposes; equal setups share one history.
struct LoopSetup {
  std::string site_id;
  Point extents;
  AlignmentClass alignment = AlignmentClass::none;
  int n_coarse_threads = 1;
  int n_fine_threads = 1;

  int dim() const { return extents.dim(); }
  std::string key() const;

  friend auto operator<=>(const LoopSetup&, const LoopSetup&) = default;
  friend bool operator==(const LoopSetup&, const LoopSetup&) = default;
};

/**
 * How a loop is split: coarse threads per dimension, tile size, fine
 * (SMT) threads per dimension and the vector width. Dimension 0 is the
 * innermost, unit-stride loop.
 */
struct ExecParams {
  Point coarse_split;
  Point tile;
  Point fine_split;
  int vector_width = 1;

  friend auto operator<=>(const ExecParams&, const ExecParams&) = default;
  friend bool operator==(const ExecParams&, const ExecParams&) = default;
};

/// "c=2x1x1 t=8x16x16 f=1x1x1 w=4"
std::string to_string(const ExecParams& p);

/// Empty string if p satisfies every invariant for this setup, else the reason.
std::string check_params(const ExecParams& p, const LoopSetup& setup, const TopologyConfig& topo);

ExecParams params_initial(const LoopSetup& setup, const TopologyConfig& topo);
std::vector<ExecParams> neighbors(const ExecParams& p, const LoopSetup& setup, const TopologyConfig& topo);

/// Every valid parameter vector (tile sizes are powers of two times the unit).
std::vector<ExecParams> all_params(const LoopSetup& setup, const TopologyConfig& topo);
ExecParams random_params(std::mt19937_64& rng, const LoopSetup& setup, const TopologyConfig& topo);

/// Smallest / largest admissible tile edge in dimension i.
Coord tile_min(const LoopSetup& setup, const TopologyConfig& topo, int i);
Coord tile_max(const LoopSetup& setup, const TopologyConfig& topo, int i);

/// All ordered factorizations of n into d positive factors.
std::vector<Point> thread_splits(int n, int d);

enum class Phase { initial, climbing, excursion };
const char* to_string(Phase p);

/**
 * Random-restart hill climbing for one loop setup.
 *
 * Climbing walks the neighbourhood of the current centre and moves to
 * the first neighbour that measures faster. Once no neighbour improves,
 * each further call starts an excursion to a random point with
 * probability p_restart. An excursion climbs from that point and is
 * kept only if it ends below the best time. Any single sample above
 * abort_factor * best_time at a non-best point sends the next call back
 * to the best parameters: an excursion ends there, a climb resumes with
 * its remaining neighbours afterwards.
 */
class SetupTuner {
public:
  SetupTuner(LoopSetup setup, const TopologyConfig& topo);

  /// Parameters for the next execution. Repeats the current parameters
  /// until they have a (non warm-up) measurement.
  ExecParams next_params();

  /// Feed one measured execution. Throws UsageError for negative or
  /// non-finite durations.
  void record_timing(const ExecParams& p, Seconds elapsed);

  bool should_abort_excursion(Seconds latest) const;

  const LoopSetup& setup() const { return setup_; }
  Phase phase() const { return phase_; }
  const ExecParams& current() const { return current_; }
  const ExecParams& best_params() const { return best_params_; }
  double best_time() const { return best_time_; }
  /// Median of the recent samples of p, or +inf if never measured.
  double median(const ExecParams& p) const;
  std::size_t sample_count(const ExecParams& p) const;
  std::size_t evaluations() const { return evaluations_; }

private:
  struct Samples {
    std::deque<double> window;
    std::size_t count = 0;
    double median = std::numeric_limits<double>::infinity();
  };

  void start_climb(const ExecParams& center, const ExecParams* came_from);
  ExecParams climb_step();

  LoopSetup setup_;
  TopologyConfig topo_;
  std::mt19937_64 rng_;
  std::map<ExecParams, Samples> samples_;
  ExecParams current_;
  ExecParams center_;
  ExecParams best_params_;
  double best_time_ = std::numeric_limits<double>::infinity();
  double last_sample_ = std::numeric_limits<double>::infinity();
  std::deque<ExecParams> pending_;
  Phase phase_ = Phase::initial;
  bool warmed_up_ = false;
  std::size_t evaluations_ = 0;
};

/// Tuning state for every loop setup seen so far.
class Tuner {
public:
  explicit Tuner(TopologyConfig topo) : topo_(std::move(topo)) { topo_.validate(); }

  SetupTuner& state(const LoopSetup& setup);
  const TopologyConfig& topology() const { return topo_; }
  std::size_t setup_count() const { return states_.size(); }

private:
  TopologyConfig topo_;
  std::map<LoopSetup, SetupTuner> states_;
};

/// One row per loop execution.
struct LogRow {
  std::string setup_id;
  ExecParams params;
  std::int64_t elapsed_ns = 0;
  Phase phase = Phase::initial;
  bool is_best = false;
};

class ExecutionLog {
public:
  void append(LogRow row) { rows_.push_back(std::move(row)); }
  const std::vector<LogRow>& rows() const { return rows_; }
  /// setup_id,coarse_split,tile,fine_split,vector_width,elapsed_ns,phase,is_best
  void write_csv(std::ostream& os) const;

private:
  std::vector<LogRow> rows_;
};

} // namespace gridkit::tuning

#endif // GRIDKIT_TUNER_HPP
