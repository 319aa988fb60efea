// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "ghomog/harness.hpp"
#include "ghomog/homogenize.hpp"
#include "ghomog/reachability.hpp"
#include "ghomog/stats.hpp"

using namespace ghomog;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int prec = 4) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", prec, x);
  return b;
}

fs::path out_root() {
  const char* env = std::getenv("GHOMOG_OUT");
  return env && *env ? fs::path(env) : fs::path("acceptance_out");
}

RunResult run(const std::string& text, const std::string& sub = "", int workers = 0) {
  RunOptions o;
  o.out_dir = (out_root() / sub).string();
  o.workers = workers;
  return run_experiment(ExperimentConfig::parse(text), o);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Field random_field(std::uint64_t seed, double a = 0.5) {
  FieldSpec s;
  s.amplitude = a;
  return Field(s, seed);
}

double slope_of(const nlohmann::json& fit) { return fit.is_object() ? fit["slope"].get<double>() : NAN; }

// ---- criteria ---------------------------------------------------------------

Outcome zero_field_oracle() {
  FieldSpec s;
  s.amplitude = 0;
  const Field f(s, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const GridConfig cfg = GridConfig::centered(2, 16, 0.25, 0.1);  // 128^2 cells
  const PassageMap pm = first_passage(f, {0, 0, 0}, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < pm.grid().size(); ++i) {
    const Vec c = pm.grid().center(i);
    if (norm(c) > 12) continue;
    worst = std::max(worst, std::abs(pm.time(i) - norm(c)));
    ++checked;
  }
  const double tol = 0.25 + 2 * 0.1;
  return {worst <= tol && secs < 10 && pm.grid().size() == 128 * 128,
          std::to_string(checked) + " cells, max |theta - |y|| = " + fmt(worst) + " (tol " + fmt(tol) +
              "), runtime " + fmt(secs, 3) + " s"};
}

Outcome solver_cross_validation() {
  const double h = 0.125, dt = 0.04;
  const double tol = 3 * (h + dt);
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field f = random_field(seed);
    std::vector<Vec> ys;
    std::uint64_t k = seed * 1000;
    while (ys.size() < 20) {
      const double r = 1 + 5 * unit_double(mix64(++k)), a = 2 * M_PI * unit_double(mix64(++k));
      // Targets at main-grid cell centers so both methods see the same point.
      ys.push_back({h * std::round(r * std::cos(a) / h), h * std::round(r * std::sin(a) / h), 0});
    }
    PropagateOptions o;
    o.check_window = false;
    o.targets = ys;
    const auto arr = solve_arrivals(f, {0, 0, 0}, GridConfig::cell_centered(2, {0, 0, 0}, 8, h, dt), o);
    OracleConfig oc;
    oc.half_width = 8;
    const auto ref = oracle_passage(f, {0, 0, 0}, ys, oc);
    for (std::size_t i = 0; i < ys.size(); ++i)
      worst = std::max(worst, std::abs(arr->time[*arr->grid.cell_of(ys[i])] - ref[i]));
  }
  return {worst <= tol, "5 fields x 20 targets, max |solver - oracle| = " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

Outcome speed_and_growth() {
  const double h = 0.5, dt = 0.1, t_max = 25;
  std::size_t violations = 0, steps = 0;
  double beta = INFINITY;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Field f = random_field(seed);
    const GridConfig cfg = GridConfig::cell_centered(2, {0, 0, 0}, required_radius(f, t_max), h, dt);
    const GridFront front = propagate(f, {0, 0, 0}, t_max, cfg);
    for (std::int32_t k = 0; k <= front.steps(); ++k) {
      const double t = k * front.dt();
      const double env = (f.L() + 1) * t + h;
      for (const Vec& p : front.points(k)) violations += norm(p) > env;
      ++steps;
      if (t >= 5 - 1e-9) beta = std::min(beta, static_cast<double>(front.cell_count(k)) / (t * t));
    }
  }
  return {violations == 0 && beta > 0,
          std::to_string(steps) + " steps, envelope violations " + std::to_string(violations) +
              ", fitted beta = " + fmt(beta) + " cells/t^2 on [5, 25]"};
}

Outcome rearrangement() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run("[experiment]\nkind = rearrange\n[params]\ntrials = 1000\ndims = 2,3\nn_max = 12\nexhaustive_max = 8\n");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& j = r.summary["results"];
  return {j["pass"].get<bool>() && secs < 60,
          "compliance " + fmt(j["compliance"].get<double>()) + ", exhaustive " +
              fmt(j["exhaustive_compliance"].get<double>()) + " of " + fmt(j["exhaustive_checked"].get<double>()) +
              ", worst/bound " + fmt(j["worst_ratio_to_bound"].get<double>()) + ", runtime " + fmt(secs, 3) + " s"};
}

Outcome unicoherence() {
  const auto a = run("[experiment]\nkind = unicoherence\n[params]\ntrials = 10000\nside = 8\n");
  const auto b = run("[experiment]\nkind = unicoherence\n[field]\ndimension = 3\n[params]\ntrials = 1000\nside = 5\n");
  const auto& ja = a.summary["results"];
  const auto& jb = b.summary["results"];
  return {ja["pass"].get<bool>() && jb["pass"].get<bool>() && ja["checked"] == 10000 && jb["checked"] == 1000,
          "8^2: " + fmt(ja["pass_rate"].get<double>()) + " of " + ja["checked"].dump() +
              "; 5^3: " + fmt(jb["pass_rate"].get<double>()) + " of " + jb["checked"].dump()};
}

Outcome cluster_tails() {
  const auto r = run("[experiment]\nkind = percolation-tail\n[params]\ntrials = 10000\np = 0.95\nset_size = 40\n");
  const auto& j = r.summary["results"];
  const double r2 = j.contains("r2") ? j["r2"].get<double>() : NAN;
  return {j["pass"].get<bool>(),
          "slope " + fmt(j["slope"].get<double>()) + ", R^2 " + fmt(r2) + ", " +
              (j.contains("points") ? j["points"].dump() : std::string("?")) + " tail points"};
}

Outcome giant_cluster() {
  const auto r = run("[experiment]\nkind = giant-cluster\n[params]\ntrials = 1000\np = 0.95\nR = 20\nn = 25\n");
  const double p = r.summary["results"]["probability"].get<double>();
  return {p >= 0.99, "P[E_n] = " + fmt(p) + " +- " + fmt(r.summary["results"]["std_error"].get<double>())};
}

Outcome detour() {
  const auto r = run("[experiment]\nkind = detour\n[params]\ntrials = 1000\np = 0.95\n");
  const auto& j = r.summary["results"];
  return {j["pass"].get<bool>() && j["compliance"].get<double>() == 1.0,
          "compliance " + fmt(j["compliance"].get<double>()) + " over " + j["checked"].dump() + ", revisits " +
              j["revisits"].dump() + ", fallbacks " + j["fallbacks"].dump()};
}

nlohmann::json fluctuation_summary;

Outcome fluctuation_std() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run("[experiment]\nkind = fluctuation\n[params]\ntrials = 100\nradii = 16,32,64,128\n");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fluctuation_summary = r.summary["results"];
  const double e = slope_of(fluctuation_summary["std_exponent"]);
  return {e <= 0.75 && r.failed_trials == 0 && secs <= 3600,
          "std exponent " + fmt(e) + " (r2 " + fmt(fluctuation_summary["std_exponent"].value("r2", NAN)) +
              "), runtime " + fmt(secs, 3) + " s"};
}

Outcome fluctuation_bias() {
  if (fluctuation_summary.is_null())
    fluctuation_summary = run("[experiment]\nkind = fluctuation\n[params]\ntrials = 100\nradii = 16,32,64,128\n")
                              .summary["results"];
  const double e = slope_of(fluctuation_summary["bias_exponent"]);
  std::string biases;
  for (const auto& r : fluctuation_summary["by_radius"]) biases += (biases.empty() ? "" : ", ") + fmt(r["bias"].get<double>(), 3);
  return {e <= 0.75, "bias exponent " + fmt(e) + " (biases " + biases + "; theta_bar " +
                         fmt(fluctuation_summary["theta_bar"].get<double>(), 6) + ")"};
}

Outcome shape_convergence() {
  const auto r = run("[experiment]\nkind = shape\n[params]\ntrials = 30\ntimes = 25,50,100\n");
  const auto& j = r.summary["results"];
  std::string meds;
  for (const auto& h : j["hausdorff"]) meds += (meds.empty() ? "" : ", ") + fmt(h["median"].get<double>());
  return {j["median_strictly_decreasing"].get<bool>() && r.failed_trials == 0, "median Hausdorff " + meds};
}

Outcome homogenization_rate() {
  const auto r = run("[experiment]\nkind = homog-error\n[params]\ntrials = 30\neps = 0.0625,0.03125,0.015625\ntimes = 1,2,3,4\n");
  const auto& j = r.summary["results"];
  const double e = slope_of(j["rate_exponent"]);
  std::string meds;
  for (const auto& h : j["by_eps"]) meds += (meds.empty() ? "" : ", ") + fmt(h["median"].get<double>());
  return {j["median_decreasing"].get<bool>() && e >= 0.4 && r.failed_trials == 0,
          "median errors " + meds + ", exponent " + fmt(e)};
}

Outcome hamiltonian_identities() {
  EstimateOptions o;
  o.directions = 64;
  o.radii = {16, 32};
  o.trials = 4;
  FieldSpec s;
  const ShapeEstimate est = estimate_theta_bar(s, o);
  const double res = 1 - std::cos(2 * M_PI / 64);  // direction-grid resolution
  bool exact = true;
  double worst_rel = 0;
  for (int k = 0; k < 40; ++k) {
    const double a = 0.157 * k;
    const Vec p{(0.5 + 0.05 * k) * std::cos(a), (0.5 + 0.05 * k) * std::sin(a), 0};
    const double H = effective_H(est, p);
    exact = exact && effective_H(est, 2.0 * p) == 2 * H;
    worst_rel = std::max(worst_rel, std::abs(support_function(est, p) - H) / H);
  }
  FieldSpec z;
  z.amplitude = 0;
  const ShapeEstimate zero = estimate_theta_bar(z, o);
  double zero_rel = 0;
  for (int k = 0; k < 40; ++k) {
    const Vec p{std::cos(0.1 * k), std::sin(0.1 * k), 0};
    zero_rel = std::max(zero_rel, std::abs(effective_H(zero, 3.0 * p) - 3) / 3);
  }
  return {exact && worst_rel <= res && zero_rel <= 0.01,
          std::string("H(2p) = 2H(p) ") + (exact ? "exact" : "VIOLATED") + ", two-formula rel gap " + fmt(worst_rel) +
              " (grid resolution " + fmt(res) + "), zero field max rel |H - |p|| " + fmt(zero_rel)};
}

Outcome continuity() {
  const auto r = run("[experiment]\nkind = continuity\n[params]\ntrials = 50\nlevels = 4\n");
  const auto& j = r.summary["results"];
  std::string s;
  for (const auto& l : j["by_level"])
    s += (s.empty() ? "" : ", ") + fmt(l["sup_difference"].get<double>()) + "+-" + fmt(l["std_error"].get<double>(), 2);
  return {j["decreasing_beyond_error"].get<bool>() && r.failed_trials == 0, "sup_p |H^n - H| by n: " + s};
}

Outcome alexander() {
  const auto a = run("[experiment]\nkind = skeleton-gap\n[params]\noracle = sqrt\nlevels = 5\n");
  const auto b = run("[experiment]\nkind = skeleton-gap\n[params]\noracle = norm\nlevels = 5\n");
  const double c = a.summary["results"]["bound_constant"].get<double>();
  const double slack = b.summary["results"]["max_abs_slack"].get<double>();
  return {c <= 1.05 && slack == 0.0 && a.summary["results"]["levels"].size() >= 5,
          "sqrt oracle sup (f - fbar)/|x|^1/2 = " + fmt(c) + ", norm oracle max |slack| = " + fmt(slack)};
}

Outcome reproducibility() {
  const std::vector<std::string> configs{
      "[experiment]\nkind = detour\nseed = 17\n[params]\ntrials = 200\n",
      "[experiment]\nkind = fluctuation\nseed = 5\n[params]\ntrials = 8\nradii = 8,16\nref_trials = 3\nref_radius = 32\n",
      "[experiment]\nkind = rearrange\nseed = 9\n[params]\ntrials = 200\nexact = true\n"};
  std::size_t same = 0;
  for (const auto& c : configs) {
    const auto a = run(c, "repro-w1", 1);
    const auto b = run(c, "repro-w3", 3);
    const auto r = run(c, "repro-w1", 1);
    const std::string ca = slurp(a.csv_path);
    same += ca.size() > 40 && ca == slurp(b.csv_path) && ca == slurp(r.csv_path);
  }
  return {same == configs.size(), std::to_string(same) + "/" + std::to_string(configs.size()) +
                                      " configs byte-identical across workers 1, 3 and a rerun"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"zero-field oracle", zero_field_oracle},
      {"solver cross-validation", solver_cross_validation},
      {"speed and growth envelopes", speed_and_growth},
      {"rearrangement lemma", rearrangement},
      {"unicoherence", unicoherence},
      {"closed-cluster tails", cluster_tails},
      {"giant-cluster event", giant_cluster},
      {"detour skeleton", detour},
      {"fluctuation scaling", fluctuation_std},
      {"bias scaling", fluctuation_bias},
      {"shape convergence", shape_convergence},
      {"homogenization rate", homogenization_rate},
      {"effective-Hamiltonian identities", hamiltonian_identities},
      {"continuity in the law", continuity},
      {"Alexander machinery", alexander},
      {"reproducibility", reproducibility}};

  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
