#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ghomog/harness.hpp"

using namespace ghomog;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ghomog-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
std::string config_error(std::string_view text) {
  try {
    ExperimentConfig::parse(text).setup();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return "";
}
bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }
}  // namespace

TEST_CASE("validation names the offending field") {
  const auto empty = validate_config("");
  CHECK_FALSE(empty.ok);
  CHECK(contains(empty.message, "missing experiment kind"));
  CHECK(empty.normalized.empty());

  const std::string cfl = config_error("[experiment]\nkind = shape\n[grid]\nspacing = 0.25\ntime_step = 0.2\n");
  CHECK(contains(cfl, "time_step <="));
  CHECK(contains(config_error("[experiment]\nkind = warp\n"), "experiment.kind"));
  CHECK(contains(config_error("[experiment]\nkind = detour\n[params]\nradius = 1\n"), "detour.params.radius"));
  CHECK(contains(config_error("[experiment]\nkind = detour\n[params]\ncolour = red\n"), "params.colour"));
  CHECK(contains(config_error("[experiment]\nkind = detour\n[weather]\n"), "unknown section [weather]"));
  CHECK(contains(config_error("[experiment]\nkind = detour\nworkers = 0\n"), "experiment.workers"));
  CHECK(contains(config_error("[experiment]\nkind = detour\n[field]\namplitude = -1\n"), "field.amplitude"));
  CHECK(contains(config_error("[experiment]\nkind = detour\n[grid]\nfoo = 1\n"), "grid.foo"));
}

TEST_CASE("valid config normalizes with defaults and round-trips") {
  const auto rep = validate_config("[experiment]\nkind = fluctuation\n[params]\ntrials = 7\n");
  REQUIRE(rep.ok);
  CHECK(rep.message == "ok");
  CHECK(contains(rep.normalized, "ref_radius = 512"));
  CHECK(contains(rep.normalized, "trials = 7"));
  CHECK(contains(rep.normalized, "amplitude = 0.5"));
  const auto again = validate_config(rep.normalized);
  REQUIRE(again.ok);
  CHECK(again.normalized == rep.normalized);

  const auto a = ExperimentConfig::parse(rep.normalized);
  auto b = a;
  b.workers = 4;
  b.budget_seconds = 30;
  CHECK(a.hash() == b.hash());
  b.master_seed = 2;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("catalog lists every kind with schemas") {
  const auto cat = catalog_json();
  std::vector<std::string> kinds;
  for (const auto& k : cat) {
    kinds.push_back(k["kind"]);
    CHECK(k["params"].is_array());
  }
  for (const char* k : {"field-check", "percolation-tail", "unicoherence", "detour", "rearrange", "shape",
                        "fluctuation", "homog-error", "continuity", "skeleton-gap", "giant-cluster"})
    CHECK(std::find(kinds.begin(), kinds.end(), k) != kinds.end());
}

TEST_CASE("csv rendering") {
  const std::string csv = render_csv("x", {{5, "a", 1.5}, {6, "b", -2}});
  CHECK(csv == "experiment,seed,parameter,value\nx,5,a,1.5\nx,6,b,-2\n");
}

TEST_CASE("field-check on the zero field reports zero violations") {
  const auto dir = scratch("fc");
  auto c = ExperimentConfig::parse("[experiment]\nkind = field-check\n[field]\namplitude = 0\n[params]\ntrials = 2\nsamples = 200\n");
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run_experiment(c, o);
  CHECK(r.completed_trials == 2);
  CHECK(r.summary["results"]["pass"] == true);
  CHECK(r.summary["results"]["speed_violations"] == 0.0);
  CHECK(r.summary["results"]["divergence_violations"] == 0.0);
  CHECK(fs::exists(r.csv_path));
  CHECK(fs::exists(r.json_path));
  const auto js = nlohmann::json::parse(slurp(r.json_path));
  CHECK(js["config_hash"] == r.summary["config_hash"]);
  CHECK(contains(r.csv_path, "field-check-"));
  // No temporaries left behind.
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 2);
  fs::remove_all(dir);
}

TEST_CASE("rearrange run reports full compliance") {
  const auto dir = scratch("re");
  auto c = ExperimentConfig::parse("[experiment]\nkind = rearrange\n[params]\ntrials = 60\n");
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run_experiment(c, o);
  CHECK(r.summary["results"]["compliance"] == 1.0);
  CHECK(r.summary["results"]["pass"] == true);
  CHECK(r.failed_trials == 0);
  fs::remove_all(dir);
}

TEST_CASE("byte-identical CSV regardless of worker count") {
  const auto d1 = scratch("w1"), d3 = scratch("w3");
  const auto c = ExperimentConfig::parse("[experiment]\nkind = detour\nseed = 99\n[params]\ntrials = 40\n");
  RunOptions o;
  o.out_dir = d1.string();
  o.workers = 1;
  const RunResult a = run_experiment(c, o);
  o.out_dir = d3.string();
  o.workers = 3;
  const RunResult b = run_experiment(c, o);
  CHECK(fs::path(a.csv_path).filename() == fs::path(b.csv_path).filename());
  const std::string ca = slurp(a.csv_path), cb = slurp(b.csv_path);
  CHECK(ca.size() > 100);
  CHECK(ca == cb);
  CHECK(a.summary["results"] == b.summary["results"]);
  // A rerun reproduces the same bytes.
  o.workers = 2;
  CHECK(slurp(run_experiment(c, o).csv_path) == ca);
  fs::remove_all(d1);
  fs::remove_all(d3);
}

TEST_CASE("budget exhaustion flags a partial run") {
  const auto dir = scratch("bud");
  auto c = ExperimentConfig::parse(
      "[experiment]\nkind = field-check\nbudget_seconds = 1e-9\n[params]\ntrials = 50\nsamples = 2000\n");
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run_experiment(c, o);
  CHECK(r.budget_exceeded);
  CHECK(r.summary["partial"] == true);
  CHECK(r.completed_trials < 50);
  fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
  CHECK(output_directory("given") == "given");
  ::setenv("GHOMOG_OUT", "/tmp/elsewhere", 1);
  CHECK(output_directory("") == "/tmp/elsewhere");
  ::unsetenv("GHOMOG_OUT");
  CHECK(output_directory("") == ".");
}

TEST_CASE("config files load from disk") {
  const auto dir = scratch("load");
  const auto path = (dir / "c.cfg").string();
  std::ofstream(path) << "# comment\n[experiment]\nkind = unicoherence\n";
  CHECK(ExperimentConfig::load(path).kind == "unicoherence");
  CHECK_THROWS_AS(ExperimentConfig::load((dir / "missing.cfg").string()), Error);
  fs::remove_all(dir);
}
