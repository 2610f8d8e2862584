#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace gridkit;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<const char*> args) {
  args.insert(args.begin(), "gridkit");
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(args.size()), args.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string temp_path(const char* name) { return std::string(CLI_TEST_TMP) + "/" + name; }

} // namespace

TEST_CASE("setops-check passes with defaults") {
  const auto r = run({"setops-check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("match the oracle") != std::string::npos);
}

TEST_CASE("setops-check in 3D with a case count") {
  const auto path = temp_path("check.csv");
  const auto r = run({"setops-check", "--dims", "3", "--cases", "60", "--out", path.c_str()});
  CHECK(r.code == 0);
  const std::string csv = slurp(path);
  CHECK(csv.rfind("case,seed,dims,result\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
}

TEST_CASE("usage errors exit with 2 and print usage") {
  for (const auto& args : std::vector<std::vector<const char*>>{
           {"setops-check", "--bogus"},
           {"setops-check", "--dims", "seven"},
           {"setops-check", "--dims", "9"},
           {"setops-check", "--cases", "0"},
           {"tune-sim", "--lane-width", "3"},
           {"stencil-bench", "--dims", "2"},
           {"stencil-bench", "--topology", "/nonexistent/topology.cfg"},
           {"no-such-command"},
           {}}) {
    const auto r = run(args);
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
}

TEST_CASE("setops-bench writes one row per impl and size") {
  const auto path = temp_path("bench.csv");
  const auto r = run({"setops-bench", "--min-n", "16", "--max-n", "64", "--out", path.c_str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("slope tree") != std::string::npos);
  CHECK(r.out.find("slope naive") != std::string::npos);
  const std::string csv = slurp(path);
  CHECK(csv.rfind("impl,n,seconds\n", 0) == 0);
  for (const char* row : {"tree,16,", "naive,16,", "tree,32,", "naive,32,", "tree,64,", "naive,64,"}) {
    CHECK(csv.find(row) != std::string::npos);
  }
}

TEST_CASE("stencil-bench agrees bit for bit and logs phases") {
  const auto path = temp_path("stencil.csv");
  const auto r = run({"stencil-bench", "--extent", "12", "--iters", "25", "--threads", "2", "--lane-width", "8",
                      "--out", path.c_str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("tuned bit-identical") != std::string::npos);
  const std::string csv = slurp(path);
  CHECK(csv.rfind("iteration,path,seconds,phase,params\n", 0) == 0);
  CHECK(csv.find(",tuned,") != std::string::npos);
  CHECK(csv.find("climbing") != std::string::npos);
}

TEST_CASE("stencil-bench reads a topology file") {
  const auto path = temp_path("topo.cfg");
  std::ofstream(path) << "cache_size_bytes = 16384\nlane_width = 2\nn_coarse_threads = 2\n";
  const auto r = run({"stencil-bench", "--extent", "10", "--iters", "8", "--topology", path.c_str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("2x1 threads, W=2") != std::string::npos);
}

TEST_CASE("tune-sim is reproducible") {
  const auto a = run({"tune-sim", "--seeds", "20", "--seed", "5"});
  const auto b = run({"tune-sim", "--seeds", "20", "--seed", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("of 20 runs within 10%") != std::string::npos);
}
