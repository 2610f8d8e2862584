#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <utility>

#include "gridkit/bboxset.hpp"
#include "gridkit/boxlist.hpp"
#include "gridkit/fuzz.hpp"
#include "gridkit/setgen.hpp"
#include "gridkit/stencil.hpp"
#include "gridkit/synthetic_surface.hpp"

namespace gridkit::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double median_tail(const std::vector<double>& v, std::size_t k) {
  return median(std::vector<double>(v.end() - static_cast<std::ptrdiff_t>(std::min(k, v.size())), v.end()));
}

// CSV sink; absent when no --out was given.
class CsvFile {
public:
  explicit CsvFile(const std::string& path) {
    if (path.empty()) return;
    f_.open(path);
    if (!f_) throw UsageError("cannot write '" + path + "'");
    f_.imbue(std::locale::classic());
    f_ << std::setprecision(9);
  }
  std::ostream* stream() { return f_.is_open() ? &f_ : nullptr; }

private:
  std::ofstream f_;
};

template <class F>
double time_per_call(F&& f, int samples) {
  // batch enough calls that one sample lasts at least ~20 ms
  int reps = 1;
  for (;;) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) f();
    if (seconds_since(t0) >= 0.02 || reps >= (1 << 20)) break;
    reps *= 2;
  }
  std::vector<double> s;
  for (int k = 0; k < samples; ++k) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) f();
    s.push_back(seconds_since(t0) / reps);
  }
  return median(s);
}

std::string point_str(const Point& p) {
  std::string s;
  for (int i = 0; i < p.dim(); ++i) s += (i ? "x" : "") + std::to_string(p[i]);
  return s;
}

} // namespace

void validate(const RunConfig& c) {
  auto positive = [](long long v, const char* name) {
    if (v <= 0) throw UsageError(std::string("--") + name + " must be positive");
  };
  if (c.dims != 0 && (c.dims < 1 || c.dims > max_dim)) throw UsageError("--dims must lie in [1, 4]");
  positive(c.boxes, "boxes");
  positive(c.cases, "cases");
  positive(c.seeds, "seeds");
  if (c.extent != 0) positive(c.extent, "extent");
  if (c.iters != 0) positive(c.iters, "iters");
  if (c.threads) positive(*c.threads, "threads");
  if (c.fine_threads) positive(*c.fine_threads, "fine-threads");
  if (c.lane_width) lanes::LaneConfig{*c.lane_width};
  if (!(c.noise >= 0 && c.noise < 1)) throw UsageError("--noise must lie in [0, 1)");
  positive(c.min_n, "min-n");
  if (c.max_n < c.min_n) throw UsageError("--max-n must be at least --min-n");
}

tuning::TopologyConfig topology_for(const RunConfig& cfg) {
  tuning::TopologyConfig t = cfg.topology.empty() ? tuning::TopologyConfig{} : tuning::TopologyConfig::load(cfg.topology);
  if (cfg.threads) t.n_coarse_threads = *cfg.threads;
  if (cfg.fine_threads) t.n_fine_threads = *cfg.fine_threads;
  if (cfg.lane_width) t.lane_width = *cfg.lane_width;
  t.validate();
  return t;
}

// ------------------------------------------------------------ setops-check

int cmd_setops_check(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const int dims = cfg.dims ? cfg.dims : 2;
  const fuzz::FuzzConfig fc{dims, cfg.boxes, cfg.extent ? cfg.extent : 32};
  CsvFile csv(cfg.out);
  if (auto* f = csv.stream()) *f << "case,seed,dims,result\n";
  int failures = 0;
  std::optional<fuzz::Mismatch> first;
  for (int k = 0; k < cfg.cases; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    const auto m = fuzz::check_case(seed, fc);
    if (m) {
      ++failures;
      if (!first) first = m;
    }
    if (auto* f = csv.stream()) *f << k << ',' << seed << ',' << dims << ',' << (m ? m->op : "ok") << '\n';
  }
  if (first) {
    out << "setops-check: " << failures << " of " << cfg.cases << " cases disagree with the oracle\n"
        << "minimal failing seed " << first->seed << " (operation " << first->op << ")\n"
        << "lhs:\n" << first->lhs << "\nrhs:\n" << first->rhs << '\n';
    return 1;
  }
  out << "setops-check: " << cfg.cases << " cases in " << dims << "D match the oracle\n";
  return 0;
}

// ------------------------------------------------------------ setops-bench

std::vector<BenchRow> bench_union(int dims, int min_n, int max_n, int samples) {
  std::vector<BenchRow> rows;
  for (int n = min_n; n <= max_n; n *= 2) {
    const auto boxes = grid_of_boxes(dims, n);
    Coord expect = 0;
    for (const auto& b : boxes) expect += bbox_point_count(b);
    const double tree = time_per_call([&] {
      const BBoxSet r = BBoxSet::from_bboxes(dims, boxes);
      if (r.is_empty()) throw std::logic_error("union unexpectedly empty");
    }, samples);
    const double naive = time_per_call([&] {
      if (naive_union(dims, boxes).point_count() != expect) throw std::logic_error("baseline lost points");
    }, samples);
    rows.push_back({"tree", n, tree});
    rows.push_back({"naive", n, naive});
  }
  return rows;
}

double loglog_slope(const std::vector<BenchRow>& rows, const std::string& impl) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& r : rows) {
    if (r.impl != impl) continue;
    const double x = std::log(static_cast<double>(r.n)), y = std::log(r.seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) throw UsageError("need at least two sizes to fit a slope");
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

int cmd_setops_bench(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const int dims = cfg.dims ? cfg.dims : 2;
  CsvFile csv(cfg.out);
  const auto rows = bench_union(dims, cfg.min_n, cfg.max_n);
  if (auto* f = csv.stream()) {
    *f << "impl,n,seconds\n";
    for (const auto& r : rows) *f << r.impl << ',' << r.n << ',' << r.seconds << '\n';
  }
  std::ostringstream s;
  s.imbue(std::locale::classic());
  for (const auto& r : rows) s << r.impl << " n=" << r.n << " " << r.seconds << " s\n";
  s << std::fixed << std::setprecision(3);
  if (cfg.max_n > cfg.min_n) {
    s << "slope tree " << loglog_slope(rows, "tree") << "\n";
    s << "slope naive " << loglog_slope(rows, "naive") << "\n";
  }
  out << s.str();
  return 0;
}

// ----------------------------------------------------------- stencil-bench

StencilOutcome stencil_compare(std::int64_t n, int iters, const tuning::TopologyConfig& topo, std::ostream* csv) {
  using stencil::Grid3;
  const double c = 1.0 / 8;
  const Point ext{n, n, n};
  auto fresh = [&] {
    std::pair<Grid3, Grid3> g{Grid3(ext), Grid3(ext)};
    stencil::fill_random(g.first, 7);
    stencil::fill_random(g.second, 7);
    return g;
  };
  // each path: iters Jacobi steps, returns the final grid and the per-step timings
  auto drive = [&](auto step) {
    auto [a, b] = fresh();
    std::vector<double> t;
    for (int k = 0; k < iters; ++k) {
      const auto t0 = Clock::now();
      step(a, b);
      t.push_back(seconds_since(t0));
      std::swap(a, b);
    }
    return std::pair<Grid3, std::vector<double>>(std::move(a), std::move(t));
  };

  const auto [serial, ts] = drive([&](const Grid3& in, Grid3& out) { stencil::laplacian_serial(in, out, c); });
  WorkerPool pool(topo.n_coarse_threads * topo.n_fine_threads);
  const auto [naive, tn] = drive([&](const Grid3& in, Grid3& out) { stencil::laplacian_naive(in, out, c, pool); });
  LoopRunner runner(topo);
  const auto [tuned, tt] = drive([&](const Grid3& in, Grid3& out) { stencil::laplacian_tuned(in, out, c, runner); });

  if (csv) {
    *csv << "iteration,path,seconds,phase,params\n";
    const auto& log = runner.log().rows();
    for (int k = 0; k < iters; ++k) {
      const auto u = static_cast<std::size_t>(k);
      *csv << k << ",serial," << ts[u] << ",,\n";
      *csv << k << ",naive," << tn[u] << ",,\n";
      *csv << k << ",tuned," << tt[u] << ',' << (u < log.size() ? tuning::to_string(log[u].phase) : "") << ','
           << (u < log.size() ? "c=" + point_str(log[u].params.coarse_split) + " t=" + point_str(log[u].params.tile) +
                                    " f=" + point_str(log[u].params.fine_split)
                              : "")
           << '\n';
    }
  }
  return {same_bits(serial, naive), same_bits(serial, tuned), median_tail(ts, 20), median_tail(tn, 20),
          median_tail(tt, 20)};
}

int cmd_stencil_bench(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  if (cfg.dims != 0 && cfg.dims != 3) throw UsageError("stencil-bench is three-dimensional; --dims must be 3");
  const auto topo = topology_for(cfg);
  CsvFile csv(cfg.out);
  const std::int64_t n = cfg.extent ? cfg.extent : 64;
  const int iters = cfg.iters ? cfg.iters : 100;
  const auto r = stencil_compare(n, iters, topo, csv.stream());
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "stencil-bench: " << n << "^3 grid, " << iters << " iterations, " << topo.n_coarse_threads << "x"
    << topo.n_fine_threads << " threads, W=" << topo.lane_width << "\n";
  s << "median of last 20 (s): serial " << r.serial_median << ", naive " << r.naive_median << ", tuned "
    << r.tuned_median << "\n";
  s << "naive " << (r.naive_matches ? "bit-identical" : "DIFFERS") << ", tuned "
    << (r.tuned_matches ? "bit-identical" : "DIFFERS") << "\n";
  out << s.str();
  return r.naive_matches && r.tuned_matches ? 0 : 1;
}

// ---------------------------------------------------------------- tune-sim

TuneSimSummary tune_sim(int dims, std::int64_t extent, const tuning::TopologyConfig& topo, int seeds, int evals,
                        double noise, std::uint64_t seed, std::ostream* csv) {
  using namespace tuning;
  const LoopSetup setup{"tune-sim", Point(dims, extent), AlignmentClass::none, topo.n_coarse_threads,
                        topo.n_fine_threads};
  TuneSimSummary sum;
  if (csv) *csv << "seed,optimum_cost,best_cost,evals_to_10pct,regret,max_bad_streak\n";
  double regret_total = 0;
  for (int k = 0; k < seeds; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    TopologyConfig t = topo;
    t.rng_seed = s;
    const SyntheticSurface surface(setup, t, s, noise);
    const SimTrace trace = simulate_tuning(surface, setup, t, s ^ 0x9e3779b97f4a7c15ull, evals);
    const double opt = surface.optimum_cost();
    int reached = -1;
    double spent = 0;
    for (int e = 0; e < evals; ++e) {
      spent += surface.cost(trace.executed[static_cast<std::size_t>(e)]);
      if (reached < 0 && trace.best_cost[static_cast<std::size_t>(e)] <= 1.1 * opt) reached = e + 1;
    }
    const double regret = spent / (evals * opt) - 1.0;
    ++sum.runs;
    if (reached > 0) ++sum.within_10pct;
    sum.worst_bad_streak = std::max(sum.worst_bad_streak, trace.max_bad_streak);
    regret_total += regret;
    if (csv) *csv << s << ',' << opt << ',' << trace.best_cost.back() << ',' << reached << ',' << regret << ','
                  << trace.max_bad_streak << '\n';
  }
  sum.mean_regret = sum.runs ? regret_total / sum.runs : 0;
  return sum;
}

int cmd_tune_sim(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  RunConfig c = cfg;
  if (!c.threads) c.threads = 4;
  const auto topo = topology_for(c);
  const int dims = cfg.dims ? cfg.dims : 3;
  const std::int64_t extent = cfg.extent ? cfg.extent : 64;
  const int evals = cfg.iters ? cfg.iters : 50;
  CsvFile csv(cfg.out);
  const auto s = tune_sim(dims, extent, topo, cfg.seeds, evals, cfg.noise, cfg.seed, csv.stream());
  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << "tune-sim: " << s.within_10pct << " of " << s.runs << " runs within 10% of the optimum after " << evals
    << " evaluations\n"
    << "longest streak at a config above " << topo.abort_factor << "x best: " << s.worst_bad_streak << "\n"
    << std::fixed << std::setprecision(4) << "mean cumulative regret: " << s.mean_regret << "\n";
  out << o.str();
  return 10 * s.within_10pct >= 9 * s.runs && s.worst_bad_streak <= 1 ? 0 : 1;
}

// --------------------------------------------------------------- dispatch

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gridkit: bounding-box set algebra, loop tuning and lane-vector checks"};
  app.require_subcommand(1, 1);
  RunConfig cfg;
  int threads = 0, fine_threads = 0, lane_width = 0;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const Sub subs[] = {
      {"setops-check", "compare every set operation with the point-set oracle", cmd_setops_check},
      {"setops-bench", "time box unions: derivative tree against the quadratic list", cmd_setops_bench},
      {"stencil-bench", "3D Laplacian: serial, naive split and tuned, checked bit for bit", cmd_stencil_bench},
      {"tune-sim", "tuner convergence on seeded synthetic cost surfaces", cmd_tune_sim},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> apps;
  std::vector<CLI::Option*> thread_opts, fine_opts, lane_opts;
  for (const Sub& s : subs) {
    CLI::App* a = app.add_subcommand(s.name, s.help);
    a->add_option("--dims", cfg.dims, "number of dimensions");
    a->add_option("--seed", cfg.seed, "random seed")->default_val(default_seed);
    a->add_option("--boxes", cfg.boxes, "maximum boxes per operand")->default_val(30);
    a->add_option("--extent", cfg.extent, "hull / grid edge length");
    a->add_option("--cases", cfg.cases, "number of fuzz cases")->default_val(1000);
    a->add_option("--iters", cfg.iters, "iterations or evaluations");
    thread_opts.push_back(a->add_option("--threads", threads, "coarse worker threads"));
    fine_opts.push_back(a->add_option("--fine-threads", fine_threads, "fine threads per tile"));
    lane_opts.push_back(a->add_option("--lane-width", lane_width, "vector width W"));
    a->add_option("--topology", cfg.topology, "topology config file")->check(CLI::ExistingFile);
    a->add_option("--out", cfg.out, "CSV output path");
    a->add_option("--seeds", cfg.seeds, "tune-sim: number of seeded runs")->default_val(100);
    a->add_option("--noise", cfg.noise, "tune-sim: relative timing noise")->default_val(0.02);
    a->add_option("--min-n", cfg.min_n, "setops-bench: smallest box count")->default_val(64);
    a->add_option("--max-n", cfg.max_n, "setops-bench: largest box count")->default_val(4096);
    apps.emplace_back(a, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  for (std::size_t k = 0; k < apps.size(); ++k) {
    if (thread_opts[k]->count()) cfg.threads = threads;
    if (fine_opts[k]->count()) cfg.fine_threads = fine_threads;
    if (lane_opts[k]->count()) cfg.lane_width = lane_width;
  }
  for (const auto& [a, s] : apps) {
    if (!a->parsed()) continue;
    cfg.subcommand = s->name;
    try {
      return s->fn(cfg, out);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << a->help();
      return 2;
    }
  }
  return 2;
}

} // namespace gridkit::cli
