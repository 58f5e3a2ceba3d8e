#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "layerpot/cli.hpp"
#include "layerpot/common.hpp"

using namespace layerpot;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("layerpot_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
  static inline int counter = 0;
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "layerpot");
  args.push_back("-q");
  return cli::run(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  json c = cli::default_config();
  for (const char* key : {"curve", "density", "grids", "tolerances", "output", "threads", "seed", "strict"})
    CHECK(c.contains(key));
  cli::apply_override(c, "grids.xi_count=8");
  CHECK(c["grids"]["xi_count"] == 8);
  cli::apply_override(c, "density=re");
  CHECK(c["density"] == "re");
  cli::apply_override(c, "curve.zoo=\"ex1\"");
  CHECK(c["curve"]["zoo"] == "ex1");
  cli::apply_override(c, "grids.eps=[0.5,0.25]");
  CHECK(c["grids"]["eps"].size() == 2);
  CHECK_THROWS_AS(cli::apply_override(c, "grids.nope=1"), ConfigError);
  CHECK_THROWS_AS(cli::apply_override(c, "no_equals_sign"), ConfigError);
}

TEST_CASE("sha256") {
  TempDir t;
  std::ofstream(t.sub("abc.txt")) << "abc";
  CHECK(cli::sha256_file(t.sub("abc.txt")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("curve command writes outputs and a manifest") {
  TempDir t;
  const std::string out = t.sub("circle");
  REQUIRE(run({"curve", "--zoo", "circle", "-o", out}) == cli::kExitOk);
  for (const char* f : {"curve.json", "vertices.csv", "manifest.json"}) CHECK(fs::exists(fs::path(out) / f));
  const json m = read_json(fs::path(out) / "manifest.json");
  CHECK(m["command"] == "curve");
  CHECK(m["flags"]["simple"] == true);
  for (const auto& f : m["files"])
    CHECK(f["sha256"] == cli::sha256_file((fs::path(out) / f["name"].get<std::string>()).string()));
  const json curve = read_json(fs::path(out) / "curve.json");
  CHECK(std::abs(curve["summary"]["length"].get<double>() - kTwoPi) <= 1e-6);

  const std::string ex3 = t.sub("ex3");
  REQUIRE(run({"curve", "--zoo", "ex3", "--depth", "8", "-o", ex3}) == cli::kExitOk);
  CHECK(read_json(fs::path(ex3) / "manifest.json")["flags"]["simple"] == true);
}

TEST_CASE("config file and --set layering") {
  TempDir t;
  std::ofstream(t.sub("cfg.json")) << R"({"curve": {"zoo": "ellipse", "a": 3.0}})";
  const std::string out = t.sub("o");
  REQUIRE(run({"curve", "--config", t.sub("cfg.json"), "--set", "curve.b=0.5", "-o", out}) == cli::kExitOk);
  const json m = read_json(fs::path(out) / "manifest.json");
  CHECK(m["config"]["curve"]["zoo"] == "ellipse");
  CHECK(m["config"]["curve"]["a"] == 3.0);
  CHECK(m["config"]["curve"]["b"] == 0.5);
  const json c = read_json(fs::path(out) / "curve.json");
  CHECK(std::abs(c["summary"]["diameter"].get<double>() - 6.0) <= 1e-6);
}

TEST_CASE("exit codes and cleanup") {
  TempDir t;
  std::ofstream(t.sub("open.csv")) << "x,y\n0,0\n1,0\n1,1\n0,1\n";
  const std::string out = t.sub("open_out");
  CHECK(run({"curve", "--polyline", t.sub("open.csv"), "-o", out}) == cli::kExitConstruction);
  CHECK_FALSE(fs::exists(out));

  CHECK(run({"curve", "--zoo", "trefoil", "-o", t.sub("a")}) == cli::kExitConfig);
  CHECK(run({"curve", "--set", "grids.bogus=1", "-o", t.sub("b")}) == cli::kExitConfig);
  CHECK(run({"curve", "--no-such-flag"}) == cli::kExitConfig);
  CHECK(run({}) == cli::kExitConfig);
  CHECK(run({"curve", "--config", t.sub("missing.json"), "-o", t.sub("c")}) == cli::kExitConfig);
  CHECK(run({"potential", "--zoo", "circle", "--grid", "8by8", "-o", t.sub("d")}) == cli::kExitConfig);
  CHECK(cli::run({"layerpot", "zoo-list"}) == cli::kExitOk);

  // Two approach levels leave no room to confirm a limit.
  const std::string strict = t.sub("strict");
  CHECK(run({"potential", "--zoo", "circle", "--density", "re", "--grid", "4x4", "--boundary-sweep", "--set",
             "grids.h_levels=2", "--set", "grids.boundary_points=2", "--strict", "-o", strict}) ==
        cli::kExitNonConvergence);
  CHECK_FALSE(fs::exists(strict));
}

TEST_CASE("potential command") {
  TempDir t;
  const std::string out = t.sub("re");
  REQUIRE(run({"potential", "--zoo", "circle", "--density", "re", "--grid", "24x24", "-o", out}) == cli::kExitOk);
  const auto rows = read_csv(fs::path(out) / "field.csv");
  REQUIRE(rows.size() == 576);
  int checked = 0;
  for (const auto& r : rows) {
    if (r[4] != 1.0) continue;
    if (checked == 20) break;
    CHECK(std::abs(r[2] - r[0] / 2.0) <= 1e-6);
    CHECK(std::abs(r[3] - r[1] / 2.0) <= 1e-6);
    ++checked;
  }
  CHECK(checked == 20);

  const std::string one = t.sub("one");
  REQUIRE(run({"potential", "--zoo", "ex4", "--density", "const:1", "--grid", "16x16", "-o", one}) == cli::kExitOk);
  for (const auto& r : read_csv(fs::path(one) / "field.csv")) {
    if (r[4] < 0) continue;
    CHECK(std::abs(r[2] - r[4]) <= 1e-9);
  }

  const std::string sweep = t.sub("sweep");
  REQUIRE(run({"potential", "--zoo", "circle", "--density", "re", "--grid", "4x4", "--boundary-sweep", "--set",
               "grids.boundary_points=6", "-o", sweep}) == cli::kExitOk);
  for (const auto& r : read_csv(fs::path(sweep) / "boundary.csv")) {
    // s, plus formula, plus limit, minus formula, minus limit, jump, g, pv_full
    CHECK(std::abs(r[5] - r[6]) <= 1e-3);
    CHECK(std::abs(r[1] - r[2]) <= 1e-4);
  }
}

TEST_CASE("criterion and lemma-check commands") {
  TempDir t;
  const std::string re = t.sub("re");
  REQUIRE(run({"criterion", "--zoo", "circle", "--density", "re", "--xi-count", "8", "-o", re}) == cli::kExitOk);
  const auto rows = read_csv(fs::path(re) / "criterion.csv");
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] < rows[i - 1][1]);
  CHECK(read_json(fs::path(re) / "manifest.json")["flags"]["criterion_decreasing"] == true);

  const std::string flat = t.sub("flat");
  REQUIRE(run({"criterion", "--zoo", "circle", "--density", "const:1", "--xi-count", "8", "-o", flat}) ==
          cli::kExitOk);
  for (const auto& r : read_csv(fs::path(flat) / "criterion.csv")) CHECK(r[1] == 0.0);

  const std::string lemma = t.sub("lemma");
  REQUIRE(run({"lemma-check", "--zoo", "circle", "--density", "re", "--set", "grids.lemma_cases=8", "-o", lemma}) ==
          cli::kExitOk);
  CHECK(read_csv(fs::path(lemma) / "lemma.csv").size() == 8);
}

TEST_CASE("diagnose command") {
  TempDir t;
  const std::string c = t.sub("circle");
  REQUIRE(run({"diagnose", "--zoo", "circle", "--xi-count", "4", "--directions", "720", "--set",
               "grids.ahlfors_xi_count=16", "-o", c}) == cli::kExitOk);
  const json m = read_json(fs::path(c) / "manifest.json");
  CHECK(m["flags"]["ahlfors"] == true);
  CHECK(m["flags"]["kral"] == true);
  CHECK(m["flags"]["theorem3"] == true);
  const json report = read_json(fs::path(c) / "report.json");
  CHECK(std::abs(report["kral"]["sup_functional"].get<double>() - kPi) <= 2e-2);

  const std::string e3 = t.sub("ex3");
  REQUIRE(run({"diagnose", "--zoo", "ex3", "--depth", "6", "--xi-count", "2", "--directions", "720", "--set",
               "grids.depths=[4,6]", "--set", "grids.ahlfors_xi_count=8", "-o", e3}) == cli::kExitOk);
  const json m3 = read_json(fs::path(e3) / "manifest.json");
  CHECK(m3["flags"]["kral_depth_increasing"] == true);
  CHECK(m3["flags"]["kral"] == false);
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir t;
  const std::string a = t.sub("a"), b = t.sub("b");
  REQUIRE(run({"lemma-check", "--zoo", "ex4", "--set", "grids.lemma_cases=6", "--seed", "5", "-o", a}) ==
          cli::kExitOk);
  REQUIRE(run({"lemma-check", "--zoo", "ex4", "--set", "grids.lemma_cases=6", "--seed", "5", "-j", "3", "-o", b}) ==
          cli::kExitOk);
  for (const char* f : {"lemma.csv", "report.json"})
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
}
