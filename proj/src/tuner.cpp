#include "gridkit/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <locale>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gridkit/errors.hpp"

namespace gridkit::tuning {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  in.imbue(std::locale::classic());
  T out{};
  in >> out;
  if (!in || !(in >> std::ws).eof()) throw UsageError("config: bad value for " + key + ": '" + value + "'");
  return out;
}

std::vector<int> prime_factors(int n) {
  std::vector<int> out;
  for (int p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Admissible tile edges in dimension i: unit * 2^k up to tile_max.
std::vector<Coord> tile_values(const LoopSetup& setup, const TopologyConfig& topo, int i) {
  std::vector<Coord> out;
  const Coord hi = tile_max(setup, topo, i);
  for (Coord t = tile_min(setup, topo, i); t <= hi; t *= 2) out.push_back(t);
  return out;
}

// Moves of one prime factor from dimension a to dimension b.
void split_moves(const Point& split, std::vector<Point>& out) {
  const int d = split.dim();
  for (int a = 0; a < d; ++a) {
    for (int p : prime_factors(static_cast<int>(split[a]))) {
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        Point q = split;
        q[a] /= p;
        q[b] *= p;
        out.push_back(q);
      }
    }
  }
}

void require_setup(const LoopSetup& setup) {
  if (setup.dim() < 1) throw UsageError("loop setup needs at least one dimension");
  for (int i = 0; i < setup.dim(); ++i) {
    if (setup.extents[i] <= 0) throw UsageError("loop setup extents must be positive");
  }
  if (setup.n_coarse_threads < 1 || setup.n_fine_threads < 1) throw UsageError("thread counts must be positive");
}

} // namespace

const char* to_string(AlignmentClass a) {
  switch (a) {
  case AlignmentClass::none: return "none";
  case AlignmentClass::vector: return "vector";
  case AlignmentClass::cache_line: return "cache_line";
  }
  return "?";
}

AlignmentClass parse_alignment(std::string_view s) {
  if (s == "none") return AlignmentClass::none;
  if (s == "vector") return AlignmentClass::vector;
  if (s == "cache_line") return AlignmentClass::cache_line;
  throw UsageError("unknown alignment class '" + std::string(s) + "'");
}

const char* to_string(Phase p) {
  switch (p) {
  case Phase::initial: return "initial";
  case Phase::climbing: return "climbing";
  case Phase::excursion: return "excursion";
  }
  return "?";
}

// ------------------------------------------------------------------ config

TopologyConfig TopologyConfig::parse(std::string_view text) {
  TopologyConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "cache_size_bytes") c.cache_size_bytes = parse_number<std::int64_t>(key, value);
    else if (key == "cache_line_bytes") c.cache_line_bytes = parse_number<int>(key, value);
    else if (key == "n_coarse_threads") c.n_coarse_threads = parse_number<int>(key, value);
    else if (key == "n_fine_threads") c.n_fine_threads = parse_number<int>(key, value);
    else if (key == "lane_width") c.lane_width = parse_number<int>(key, value);
    else if (key == "p_restart") c.p_restart = parse_number<double>(key, value);
    else if (key == "abort_factor") c.abort_factor = parse_number<double>(key, value);
    else if (key == "rng_seed") c.rng_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "median_window") c.median_window = parse_number<int>(key, value);
    else if (key == "discard_warmup") c.discard_warmup = parse_number<int>(key, value) != 0;
    else if (key == "bytes_per_point") c.bytes_per_point = parse_number<int>(key, value);
    else throw UsageError("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

TopologyConfig TopologyConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open topology file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void TopologyConfig::validate() const {
  if (cache_size_bytes <= 0) throw UsageError("cache_size_bytes must be positive");
  if (cache_line_bytes < 8 || cache_line_bytes % 8 != 0) throw UsageError("cache_line_bytes must be a positive multiple of 8");
  if (n_coarse_threads < 1 || n_fine_threads < 1) throw UsageError("thread counts must be positive");
  if (lane_width < 1 || lane_width > 16 || (lane_width & (lane_width - 1)) != 0) {
    throw UsageError("lane_width must be a power of two in [1, 16]");
  }
  if (!(p_restart >= 0.0 && p_restart <= 1.0)) throw UsageError("p_restart must lie in [0, 1]");
  if (!(abort_factor >= 1.0) || !std::isfinite(abort_factor)) throw UsageError("abort_factor must be >= 1");
  if (median_window < 1) throw UsageError("median_window must be positive");
  if (bytes_per_point < 1) throw UsageError("bytes_per_point must be positive");
}

Coord TopologyConfig::inner_unit(AlignmentClass a) const {
  if (a == AlignmentClass::cache_line) return std::lcm(Coord{lane_width}, Coord{cache_line_bytes / 8});
  return lane_width;
}

// ------------------------------------------------------------ param space

std::string LoopSetup::key() const {
  std::ostringstream s;
  s << site_id << '|';
  for (int i = 0; i < dim(); ++i) s << (i ? "x" : "") << extents[i];
  s << '|' << to_string(alignment) << '|' << n_coarse_threads << '|' << n_fine_threads;
  return s.str();
}

std::string to_string(const ExecParams& p) {
  auto vec = [](const Point& v) {
    std::string s;
    for (int i = 0; i < v.dim(); ++i) s += (i ? "x" : "") + std::to_string(v[i]);
    return s;
  };
  return "c=" + vec(p.coarse_split) + " t=" + vec(p.tile) + " f=" + vec(p.fine_split) +
         " w=" + std::to_string(p.vector_width);
}

Coord tile_min(const LoopSetup& setup, const TopologyConfig& topo, int i) {
  return i == 0 ? topo.inner_unit(setup.alignment) : 1;
}

Coord tile_max(const LoopSetup& setup, const TopologyConfig& topo, int i) {
  Coord t = tile_min(setup, topo, i);
  while (t < setup.extents[i]) t *= 2;
  return t;
}

std::vector<Point> thread_splits(int n, int d) {
  if (n < 1 || d < 1 || d > max_dim) throw UsageError("thread_splits: bad arguments");
  std::vector<Point> out;
  Point cur(d, 1);
  auto rec = [&](auto&& self, int i, int rest) -> void {
    if (i == d - 1) {
      cur[i] = rest;
      out.push_back(cur);
      return;
    }
    for (int f = 1; f <= rest; ++f) {
      if (rest % f != 0) continue;
      cur[i] = f;
      self(self, i + 1, rest / f);
    }
  };
  rec(rec, 0, n);
  return out;
}

std::string check_params(const ExecParams& p, const LoopSetup& setup, const TopologyConfig& topo) {
  const int d = setup.dim();
  if (p.coarse_split.dim() != d || p.tile.dim() != d || p.fine_split.dim() != d) return "dimension mismatch";
  if (p.vector_width != topo.lane_width) return "vector width differs from the lane width";
  if (p.coarse_split.product() != setup.n_coarse_threads) return "coarse split does not multiply to the thread count";
  if (p.fine_split.product() != setup.n_fine_threads) return "fine split does not multiply to the thread count";
  for (int i = 0; i < d; ++i) {
    if (p.coarse_split[i] < 1 || p.fine_split[i] < 1) return "thread split components must be positive";
    if (p.tile[i] < tile_min(setup, topo, i) || p.tile[i] > tile_max(setup, topo, i)) return "tile size out of range";
  }
  if (p.tile[0] % topo.inner_unit(setup.alignment) != 0) return "innermost tile is not a multiple of the alignment unit";
  return {};
}

ExecParams params_initial(const LoopSetup& setup, const TopologyConfig& topo) {
  require_setup(setup);
  const int d = setup.dim();
  ExecParams p{Point(d, 1), Point(d, 1), Point(d, 1), topo.lane_width};

  // coarse threads: each prime goes to the dimension with the longest block, outermost on ties
  std::vector<int> primes = prime_factors(setup.n_coarse_threads);
  std::sort(primes.rbegin(), primes.rend());
  for (int f : primes) {
    int pick = d - 1;
    for (int i = d - 1; i >= 0; --i) {
      if (setup.extents[i] * p.coarse_split[pick] > setup.extents[pick] * p.coarse_split[i]) pick = i;
    }
    p.coarse_split[pick] *= f;
  }

  // tiles: start from the whole extent, halve the longest edge until the working set fits half the cache
  Point floor(d, 1);
  for (int i = 0; i < d; ++i) {
    p.tile[i] = tile_max(setup, topo, i);
    floor[i] = tile_min(setup, topo, i);
  }
  const Coord unit = floor[0];
  Coord inner_floor = unit;
  while (inner_floor < 2 * topo.lane_width) inner_floor *= 2;
  floor[0] = std::min(inner_floor, p.tile[0]);
  auto footprint = [&] {
    Coord v = topo.bytes_per_point;
    for (int i = 0; i < d; ++i) v *= std::min(p.tile[i], setup.extents[i]);
    return v;
  };
  while (2 * footprint() > topo.cache_size_bytes) {
    int pick = -1;
    for (int i = d - 1; i >= 0; --i) {
      if (p.tile[i] <= floor[i]) continue;
      if (pick < 0 || std::min(p.tile[i], setup.extents[i]) > std::min(p.tile[pick], setup.extents[pick])) pick = i;
    }
    if (pick < 0) break;
    p.tile[pick] /= 2;
  }

  // fine threads share a tile; split it along its longest outer edge
  primes = prime_factors(setup.n_fine_threads);
  std::sort(primes.rbegin(), primes.rend());
  for (int f : primes) {
    int pick = d > 1 ? d - 1 : 0;
    for (int i = d - 1; i >= (d > 1 ? 1 : 0); --i) {
      if (std::min(p.tile[i], setup.extents[i]) * p.fine_split[pick] >
          std::min(p.tile[pick], setup.extents[pick]) * p.fine_split[i]) {
        pick = i;
      }
    }
    p.fine_split[pick] *= f;
  }
  return p;
}

std::vector<ExecParams> neighbors(const ExecParams& p, const LoopSetup& setup, const TopologyConfig& topo) {
  std::vector<ExecParams> out;
  for (int i = 0; i < setup.dim(); ++i) {
    if (p.tile[i] * 2 <= tile_max(setup, topo, i)) {
      ExecParams q = p;
      q.tile[i] *= 2;
      out.push_back(q);
    }
    if (p.tile[i] / 2 >= tile_min(setup, topo, i) && p.tile[i] % 2 == 0) {
      ExecParams q = p;
      q.tile[i] /= 2;
      out.push_back(q);
    }
  }
  std::vector<Point> moves;
  split_moves(p.coarse_split, moves);
  for (const Point& c : moves) {
    ExecParams q = p;
    q.coarse_split = c;
    out.push_back(q);
  }
  moves.clear();
  split_moves(p.fine_split, moves);
  for (const Point& f : moves) {
    ExecParams q = p;
    q.fine_split = f;
    out.push_back(q);
  }
  // dedupe keeping first occurrence order
  std::vector<ExecParams> uniq;
  for (auto& q : out) {
    if (q == p || std::find(uniq.begin(), uniq.end(), q) != uniq.end()) continue;
    uniq.push_back(std::move(q));
  }
  return uniq;
}

std::vector<ExecParams> all_params(const LoopSetup& setup, const TopologyConfig& topo) {
  require_setup(setup);
  const int d = setup.dim();
  std::vector<std::vector<Coord>> tiles;
  for (int i = 0; i < d; ++i) tiles.push_back(tile_values(setup, topo, i));
  const auto coarse = thread_splits(setup.n_coarse_threads, d);
  const auto fine = thread_splits(setup.n_fine_threads, d);
  std::vector<ExecParams> out;
  Point t(d, 1);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == d) {
      for (const Point& c : coarse) {
        for (const Point& f : fine) out.push_back({c, t, f, topo.lane_width});
      }
      return;
    }
    for (Coord v : tiles[static_cast<std::size_t>(i)]) {
      t[i] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

ExecParams random_params(std::mt19937_64& rng, const LoopSetup& setup, const TopologyConfig& topo) {
  require_setup(setup);
  const int d = setup.dim();
  auto pick = [&rng](const auto& v) {
    std::uniform_int_distribution<std::size_t> u(0, v.size() - 1);
    return v[u(rng)];
  };
  ExecParams p{Point(d, 1), Point(d, 1), Point(d, 1), topo.lane_width};
  for (int i = 0; i < d; ++i) p.tile[i] = pick(tile_values(setup, topo, i));
  p.coarse_split = pick(thread_splits(setup.n_coarse_threads, d));
  p.fine_split = pick(thread_splits(setup.n_fine_threads, d));
  return p;
}

// ------------------------------------------------------------------ tuner

SetupTuner::SetupTuner(LoopSetup setup, const TopologyConfig& topo)
    : setup_(std::move(setup)), topo_(topo), rng_(topo.rng_seed ^ fnv1a(setup_.key())) {
  topo_.validate();
  current_ = params_initial(setup_, topo_);
  center_ = current_;
  best_params_ = current_;
}

double SetupTuner::median(const ExecParams& p) const {
  const auto it = samples_.find(p);
  return it == samples_.end() ? std::numeric_limits<double>::infinity() : it->second.median;
}

std::size_t SetupTuner::sample_count(const ExecParams& p) const {
  const auto it = samples_.find(p);
  return it == samples_.end() ? 0 : it->second.count;
}

void SetupTuner::record_timing(const ExecParams& p, Seconds elapsed) {
  const double s = elapsed.count();
  if (!std::isfinite(s) || s < 0.0) throw UsageError("record_timing: elapsed must be finite and non-negative");
  if (topo_.discard_warmup && !warmed_up_) {
    warmed_up_ = true;
    return;
  }
  Samples& st = samples_[p];
  st.window.push_back(s);
  if (st.window.size() > static_cast<std::size_t>(topo_.median_window)) st.window.pop_front();
  ++st.count;
  std::vector<double> w(st.window.begin(), st.window.end());
  std::sort(w.begin(), w.end());
  const std::size_t n = w.size();
  st.median = n % 2 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
  last_sample_ = s;
  ++evaluations_;
  if (st.median < best_time_) {
    best_time_ = st.median;
    best_params_ = p;
  }
}

bool SetupTuner::should_abort_excursion(Seconds latest) const {
  return std::isfinite(best_time_) && latest.count() > topo_.abort_factor * best_time_;
}

void SetupTuner::start_climb(const ExecParams& center, const ExecParams* came_from) {
  center_ = center;
  auto list = neighbors(center_, setup_, topo_);
  if (came_from) {
    // try the move that just paid off once more before anything else
    ExecParams again = center_;
    bool ok = true;
    auto extend = [&ok](Coord now, Coord before) -> Coord {
      if (now == before) return now;
      if (now > before) return now % before == 0 ? now * (now / before) : (ok = false, now);
      return before % now == 0 && now % (before / now) == 0 ? now / (before / now) : (ok = false, now);
    };
    for (int i = 0; i < setup_.dim(); ++i) {
      again.tile[i] = extend(center_.tile[i], came_from->tile[i]);
      again.coarse_split[i] = extend(center_.coarse_split[i], came_from->coarse_split[i]);
      again.fine_split[i] = extend(center_.fine_split[i], came_from->fine_split[i]);
    }
    const auto it = std::find(list.begin(), list.end(), again);
    if (ok && it != list.end()) std::rotate(list.begin(), it, it + 1);
  }
  pending_.assign(list.begin(), list.end());
}

ExecParams SetupTuner::climb_step() {
  if (current_ != center_ && median(current_) < median(center_)) {
    const ExecParams from = center_;
    start_climb(current_, &from);
  }
  while (!pending_.empty()) {
    ExecParams q = pending_.front();
    pending_.pop_front();
    // already measured and no better than the centre: nothing to learn
    if (sample_count(q) > 0 && median(q) >= median(center_)) continue;
    return current_ = q;
  }

  // local optimum at center_
  if (phase_ == Phase::excursion) {
    // keep the excursion only if it produced the best time
    phase_ = Phase::climbing;
    center_ = best_params_;
    return current_ = best_params_;
  }
  center_ = best_params_;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng_) < topo_.p_restart) {
    phase_ = Phase::excursion;
    const ExecParams jump = random_params(rng_, setup_, topo_);
    start_climb(jump, nullptr);
    return current_ = jump;
  }
  return current_ = best_params_;
}

ExecParams SetupTuner::next_params() {
  if (sample_count(current_) == 0) return current_;
  switch (phase_) {
  case Phase::initial:
    phase_ = Phase::climbing;
    start_climb(current_, nullptr);
    break;
  case Phase::excursion:
    if (current_ != best_params_ && should_abort_excursion(Seconds(last_sample_))) {
      phase_ = Phase::climbing;
      pending_.clear();
      center_ = best_params_;
      return current_ = best_params_;
    }
    break;
  case Phase::climbing:
    // a neighbour far worse than the best is left at once; its siblings stay queued
    if (current_ != best_params_ && should_abort_excursion(Seconds(last_sample_))) return current_ = best_params_;
    break;
  }
  return climb_step();
}

SetupTuner& Tuner::state(const LoopSetup& setup) {
  auto it = states_.find(setup);
  if (it == states_.end()) it = states_.emplace(setup, SetupTuner(setup, topo_)).first;
  return it->second;
}

void ExecutionLog::write_csv(std::ostream& os) const {
  auto vec = [](const Point& v) {
    std::string s;
    for (int i = 0; i < v.dim(); ++i) s += (i ? "x" : "") + std::to_string(v[i]);
    return s;
  };
  os << "setup_id,coarse_split,tile,fine_split,vector_width,elapsed_ns,phase,is_best\n";
  for (const auto& r : rows_) {
    os << r.setup_id << ',' << vec(r.params.coarse_split) << ',' << vec(r.params.tile) << ','
       << vec(r.params.fine_split) << ',' << r.params.vector_width << ',' << r.elapsed_ns << ','
       << to_string(r.phase) << ',' << (r.is_best ? 1 : 0) << '\n';
  }
}

} // namespace gridkit::tuning
