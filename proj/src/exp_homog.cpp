#include <algorithm>
#include <cmath>
#include <numbers>

#include "exp_internal.hpp"
#include "ghomog/homogenize.hpp"
#include "ghomog/stats.hpp"

namespace ghomog::detail {

namespace {

void need(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Config, what);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// Exponent of a log-log fit, or null when some value is not positive.
nlohmann::json exponent(const std::vector<double>& x, const std::vector<double>& y) {
  for (double v : y)
    if (!(v > 0)) return nullptr;
  if (x.size() < 2) return nullptr;
  const LineFit f = fit_loglog(x, y);
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

// Common checks for experiments that run the propagation solver.
struct SolverSetup {
  FieldSpec spec;
  double h, dt;

  SolverSetup(const ExperimentSetup& s, double max_amplitude) : spec(s.field), h(s.grid.h), dt(s.grid.dt) {
    spec.validate();
    FieldSpec worst = spec;
    worst.amplitude = max_amplitude;
    s.grid.validate(Field(worst, 0));
  }
};

// ---- shape ----

class Shape : public Experiment {
 public:
  explicit Shape(const ExperimentSetup& s) : solver_(s, s.field.amplitude), master_(s.master_seed) {
    need(s.field.dim == 2, "field.dimension: the shape experiment needs d = 2");
    trials_ = static_cast<int>(s.params.integer("trials"));
    times_ = s.params.reals("times");
    dirs_ = static_cast<int>(s.params.integer("directions"));
    ref_trials_ = static_cast<int>(s.params.integer("ref_trials"));
    ref_radii_ = s.params.reals("ref_radii");
    need(trials_ >= 1, "shape.params.trials: must be >= 1");
    need(!times_.empty() && std::all_of(times_.begin(), times_.end(), [](double t) { return t > 0; }),
         "shape.params.times: must be positive");
    need(dirs_ >= 8, "shape.params.directions: must be >= 8");
    need(ref_trials_ >= 2, "shape.params.ref_trials: must be >= 2");
    need(!ref_radii_.empty() && std::is_sorted(ref_radii_.begin(), ref_radii_.end()) && ref_radii_.front() > 0,
         "shape.params.ref_radii: must be positive and increasing");
  }
  int trials() const override { return trials_; }

  std::vector<Row> prepare(const ParallelFor& pfor) override {
    const auto dirs = direction_grid(2, dirs_);
    std::vector<std::vector<std::vector<double>>> samples(static_cast<std::size_t>(ref_trials_));
    const std::uint64_t stream = reference_stream(master_);
    pfor(ref_trials_, [&](int i) {
      const Field f(solver_.spec, derive_seed(stream, static_cast<std::uint64_t>(i)));
      samples[static_cast<std::size_t>(i)] = passage_samples(f, dirs, ref_radii_, solver_.h, solver_.dt);
    });
    est_ = aggregate_shape(2, dirs, ref_radii_, samples, solver_.h);
    std::vector<Row> rows;
    for (std::size_t k = 0; k < dirs.size(); ++k)
      rows.push_back({stream, "theta_bar_dir" + std::to_string(k), est_.theta_bar[k]});
    return rows;
  }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const Field f(solver_.spec, seed);
    const double tmax = *std::max_element(times_.begin(), times_.end());
    const GridConfig cfg = GridConfig::cell_centered(2, {0, 0, 0}, required_radius(f, tmax), solver_.h, solver_.dt);
    PropagateOptions opts;
    opts.t_max = tmax;
    const auto arr = solve_arrivals(f, {0, 0, 0}, cfg, opts);
    const ShapeSet s1(est_, 1);
    std::vector<Row> rows;
    for (double t : times_) rows.push_back({seed, key("hausdorff_t", t), hausdorff_to_shape(*arr, t, s1)});
    return rows;
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    nlohmann::json j, per = nlohmann::json::array();
    std::vector<double> med;
    for (double t : times_) {
      const auto col = column(trials, key("hausdorff_t", t));
      med.push_back(col.empty() ? NAN : median(col));
      per.push_back({{"t", t}, {"median", med.back()}, {"mean", col.empty() ? NAN : mean(col)}});
    }
    std::size_t fekete = 0;
    for (auto f : est_.fekete_ok) fekete += f;
    j["hausdorff"] = per;
    j["median_strictly_decreasing"] = strictly_decreasing(med);
    j["fekete_directions_ok"] = fekete;
    j["directions"] = est_.directions.size();
    return j;
  }

 private:
  SolverSetup solver_;
  std::uint64_t master_;
  int trials_, dirs_, ref_trials_;
  std::vector<double> times_, ref_radii_;
  ShapeEstimate est_;
};

// ---- fluctuation ----

class Fluctuation : public Experiment {
 public:
  explicit Fluctuation(const ExperimentSetup& s) : solver_(s, s.field.amplitude), master_(s.master_seed) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    radii_ = s.params.reals("radii");
    v_ = parse_vec(s.params.reals("direction"), s.field.dim, "fluctuation.params.direction");
    ref_trials_ = static_cast<int>(s.params.integer("ref_trials"));
    ref_radius_ = s.params.real("ref_radius");
    need(trials_ >= 2, "fluctuation.params.trials: must be >= 2");
    need(!radii_.empty() && std::all_of(radii_.begin(), radii_.end(), [](double r) { return r > 0; }),
         "fluctuation.params.radii: must be positive");
    need(norm(v_) > 0, "fluctuation.params.direction: must be nonzero");
    need(ref_trials_ >= 1, "fluctuation.params.ref_trials: must be >= 1");
    need(ref_radius_ > 0, "fluctuation.params.ref_radius: must be > 0");
  }
  int trials() const override { return trials_; }

  std::vector<Row> prepare(const ParallelFor& pfor) override {
    const std::uint64_t stream = reference_stream(master_);
    std::vector<double> theta(static_cast<std::size_t>(ref_trials_));
    pfor(ref_trials_, [&](int i) {
      const Field f(solver_.spec, derive_seed(stream, static_cast<std::uint64_t>(i)));
      theta[static_cast<std::size_t>(i)] = passage_along(f, v_, {ref_radius_}, solver_.h, solver_.dt)[0];
    });
    std::vector<Row> rows;
    for (int i = 0; i < ref_trials_; ++i)
      rows.push_back({derive_seed(stream, static_cast<std::uint64_t>(i)), key("ref_theta_R", ref_radius_),
                      theta[static_cast<std::size_t>(i)]});
    theta_bar_ = mean(theta) / ref_radius_;
    theta_bar_se_ = ref_trials_ > 1 ? std_error(theta) / ref_radius_ : 0.0;
    return rows;
  }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const Field f(solver_.spec, seed);
    const auto th = passage_along(f, v_, radii_, solver_.h, solver_.dt);
    std::vector<Row> rows;
    for (std::size_t k = 0; k < radii_.size(); ++k) rows.push_back({seed, key("theta_R", radii_[k]), th[k]});
    return rows;
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    nlohmann::json j, per = nlohmann::json::array();
    std::vector<double> sd, bias;
    for (double R : radii_) {
      const auto col = column(trials, key("theta_R", R));
      const double m = col.empty() ? NAN : mean(col);
      sd.push_back(stddev(col));
      bias.push_back(std::abs(m - R * theta_bar_));
      per.push_back({{"R", R}, {"mean", m}, {"std", sd.back()}, {"std_error", col.size() > 1 ? std_error(col) : 0.0},
                     {"bias", bias.back()}});
    }
    j["theta_bar"] = theta_bar_;
    j["theta_bar_se"] = theta_bar_se_;
    j["reference_radius"] = ref_radius_;
    j["by_radius"] = per;
    j["std_exponent"] = exponent(radii_, sd);
    j["bias_exponent"] = exponent(radii_, bias);
    return j;
  }

 private:
  SolverSetup solver_;
  std::uint64_t master_;
  int trials_, ref_trials_;
  std::vector<double> radii_;
  Vec v_;
  double ref_radius_;
  double theta_bar_ = 0, theta_bar_se_ = 0;
};

// ---- homog-error ----

class HomogError : public Experiment {
 public:
  explicit HomogError(const ExperimentSetup& s) : solver_(s, s.field.amplitude), master_(s.master_seed) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    eps_ = s.params.reals("eps");
    times_ = s.params.reals("times");
    p_ = parse_vec(s.params.reals("p"), s.field.dim, "homog-error.params.p");
    ref_trials_ = static_cast<int>(s.params.integer("ref_trials"));
    ref_scale_ = s.params.real("ref_scale");
    need(trials_ >= 1, "homog-error.params.trials: must be >= 1");
    need(!eps_.empty() && eps_.front() > 0 && std::is_sorted(eps_.rbegin(), eps_.rend()) &&
             std::adjacent_find(eps_.begin(), eps_.end()) == eps_.end(),
         "homog-error.params.eps: must be positive and strictly decreasing");
    need(!times_.empty() && std::all_of(times_.begin(), times_.end(), [](double t) { return t > 0; }),
         "homog-error.params.times: must be positive");
    need(norm(p_) > 0, "homog-error.params.p: must be nonzero");
    need(ref_trials_ >= 1, "homog-error.params.ref_trials: must be >= 1");
    need(ref_scale_ > 0, "homog-error.params.ref_scale: must be > 0");
  }
  int trials() const override { return trials_; }

  // Hbar(p) from S(s)/s at s and s/2, extrapolated assuming an O(1/s) lag.
  std::vector<Row> prepare(const ParallelFor& pfor) override {
    const std::uint64_t stream = reference_stream(master_);
    std::vector<std::vector<double>> g(static_cast<std::size_t>(ref_trials_));
    pfor(ref_trials_, [&](int i) {
      const Field f(solver_.spec, derive_seed(stream, static_cast<std::uint64_t>(i)));
      g[static_cast<std::size_t>(i)] = support_growth(f, p_, {ref_scale_ / 2, ref_scale_}, solver_.h, solver_.dt);
    });
    std::vector<Row> rows;
    std::vector<double> half, full;
    for (int i = 0; i < ref_trials_; ++i) {
      const auto seed = derive_seed(stream, static_cast<std::uint64_t>(i));
      const auto& r = g[static_cast<std::size_t>(i)];
      rows.push_back({seed, key("ref_support_s", ref_scale_ / 2), r[0]});
      rows.push_back({seed, key("ref_support_s", ref_scale_), r[1]});
      half.push_back(r[0] / (ref_scale_ / 2));
      full.push_back(r[1] / ref_scale_);
    }
    H_half_ = mean(half);
    H_full_ = mean(full);
    H_bar_ = 2 * H_full_ - H_half_;
    return rows;
  }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const Field f(solver_.spec, seed);
    std::vector<double> micro;
    for (double e : eps_)
      for (double t : times_) micro.push_back(t / e);
    const auto S = support_growth(f, p_, micro, solver_.h, solver_.dt);
    std::vector<Row> rows;
    std::size_t k = 0;
    for (double e : eps_) {
      double err = 0;
      for (double t : times_) err = std::max(err, std::abs(e * S[k++] - t * H_bar_));
      rows.push_back({seed, key("error_eps", e), err});
    }
    return rows;
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    nlohmann::json j, per = nlohmann::json::array();
    std::vector<double> med;
    for (double e : eps_) {
      const auto col = column(trials, key("error_eps", e));
      med.push_back(col.empty() ? NAN : median(col));
      per.push_back({{"eps", e}, {"median", med.back()}, {"mean", col.empty() ? NAN : mean(col)}});
    }
    j["H_bar"] = H_bar_;
    j["H_bar_reference"] = {{"scale", ref_scale_}, {"half_scale_rate", H_half_}, {"full_scale_rate", H_full_}};
    j["by_eps"] = per;
    j["median_decreasing"] = strictly_decreasing(med);
    j["rate_exponent"] = exponent(eps_, med);
    return j;
  }

 private:
  SolverSetup solver_;
  std::uint64_t master_;
  int trials_, ref_trials_;
  std::vector<double> eps_, times_;
  Vec p_;
  double ref_scale_;
  double H_bar_ = 0, H_half_ = 0, H_full_ = 0;
};

// ---- continuity ----

class Continuity : public Experiment {
 public:
  explicit Continuity(const ExperimentSetup& s) : solver_(s, 2 * s.field.amplitude) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    levels_ = static_cast<int>(s.params.integer("levels"));
    radius_ = s.params.real("radius");
    dirs_ = static_cast<int>(s.params.integer("directions"));
    const auto slopes = s.params.integer("slopes");
    need(trials_ >= 2, "continuity.params.trials: must be >= 2");
    need(levels_ >= 2, "continuity.params.levels: must be >= 2");
    need(radius_ > 0, "continuity.params.radius: must be > 0");
    need(dirs_ >= 8, "continuity.params.directions: must be >= 8");
    need(slopes >= 1, "continuity.params.slopes: must be >= 1");
    for (long long k = 0; k < slopes; ++k) {
      const double a = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(slopes);
      ps_.push_back(Vec{std::cos(a), std::sin(a), 0});  // in the x-y plane for d = 3 too
    }
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const int d = solver_.spec.dim;
    const auto dirs = direction_grid(d, dirs_);
    auto hbar = [&](double amplitude) {
      FieldSpec sp = solver_.spec;
      sp.amplitude = amplitude;
      const Field f(sp, seed);
      const auto est = aggregate_shape(d, dirs, {radius_}, {passage_samples(f, dirs, {radius_}, solver_.h, solver_.dt)});
      std::vector<double> out;
      for (const Vec& p : ps_) out.push_back(effective_H(est, p));
      return out;
    };
    const double a = solver_.spec.amplitude;
    const auto base = hbar(a);
    std::vector<Row> rows;
    for (std::size_t j = 0; j < ps_.size(); ++j) rows.push_back({seed, "H_base_p" + std::to_string(j), base[j]});
    for (int n = 0; n < levels_; ++n) {
      const auto Hn = hbar(a * (1 + std::ldexp(1.0, -n)));
      for (std::size_t j = 0; j < ps_.size(); ++j)
        rows.push_back({seed, "d_n" + std::to_string(n) + "_p" + std::to_string(j), Hn[j] - base[j]});
    }
    return rows;
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    nlohmann::json j, per = nlohmann::json::array();
    std::vector<double> stat, se;
    for (int n = 0; n < levels_; ++n) {
      double best = -1, best_se = 0;
      for (std::size_t k = 0; k < ps_.size(); ++k) {
        const auto col = column(trials, "d_n" + std::to_string(n) + "_p" + std::to_string(k));
        const double m = std::abs(mean(col));
        if (m > best) {
          best = m;
          best_se = std_error(col);
        }
      }
      stat.push_back(best);
      se.push_back(best_se);
      per.push_back({{"n", n}, {"amplitude_factor", 1 + std::ldexp(1.0, -n)}, {"sup_difference", best},
                     {"std_error", best_se}});
    }
    bool beyond = true;
    for (std::size_t n = 1; n < stat.size(); ++n)
      if (!(stat[n - 1] - stat[n] > std::hypot(se[n - 1], se[n]))) beyond = false;
    j["by_level"] = per;
    j["decreasing_beyond_error"] = beyond;
    return j;
  }

 private:
  SolverSetup solver_;
  int trials_, levels_, dirs_;
  double radius_;
  std::vector<Vec> ps_;
};

}  // namespace

std::unique_ptr<Experiment> make_shape(const ExperimentSetup& s) { return std::make_unique<Shape>(s); }
std::unique_ptr<Experiment> make_fluctuation(const ExperimentSetup& s) { return std::make_unique<Fluctuation>(s); }
std::unique_ptr<Experiment> make_homog_error(const ExperimentSetup& s) { return std::make_unique<HomogError>(s); }
std::unique_ptr<Experiment> make_continuity(const ExperimentSetup& s) { return std::make_unique<Continuity>(s); }

}  // namespace ghomog::detail
