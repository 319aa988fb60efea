#include <algorithm>
#include <cmath>

#include "exp_internal.hpp"
#include "ghomog/percolation.hpp"
#include "ghomog/skeleton.hpp"
#include "ghomog/stats.hpp"

namespace ghomog::detail {

namespace {

void need(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Config, what);
}

double frobenius(const Mat& m, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += m[i][j] * m[i][j];
  return std::sqrt(s);
}

// ---- field-check ----

class FieldCheck : public Experiment {
 public:
  explicit FieldCheck(const ExperimentSetup& s) : spec_(s.field) {
    spec_.validate();
    trials_ = static_cast<int>(s.params.integer("trials"));
    samples_ = s.params.integer("samples");
    box_ = s.params.real("box");
    need(trials_ >= 1, "field-check.params.trials: must be >= 1");
    need(samples_ >= 1, "field-check.params.samples: must be >= 1");
    need(box_ > 0, "field-check.params.box: must be > 0");
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const Field field(spec_, seed);
    const FieldBounds& b = field.bounds();
    const int d = spec_.dim;
    Stream rng(hash_combine(seed, 1));
    double speed = 0, div = 0, jac = 0;
    double speed_bad = 0, div_bad = 0, jac_bad = 0;
    const double div_tol = 1e-9 * std::max(1.0, b.jacobian);
    for (long long i = 0; i < samples_; ++i) {
      Vec x{0, 0, 0};
      for (int k = 0; k < d; ++k) x[k] = rng.uniform(-box_, box_);
      const double v = norm(field.eval(x));
      const Mat J = field.jacobian(x);
      double tr = 0;
      for (int k = 0; k < d; ++k) tr += J[k][k];
      const double jf = frobenius(J, d);
      speed = std::max(speed, v);
      div = std::max(div, std::abs(tr));
      jac = std::max(jac, jf);
      speed_bad += v > b.speed * (1 + 1e-12) + 1e-15;
      div_bad += std::abs(tr) > div_tol;
      jac_bad += jf > b.jacobian * (1 + 1e-12) + 1e-15;
    }
    return {{seed, "max_speed", speed},         {seed, "max_divergence", div},
            {seed, "max_jacobian", jac},        {seed, "speed_violations", speed_bad},
            {seed, "divergence_violations", div_bad}, {seed, "jacobian_violations", jac_bad},
            {seed, "L", b.L}};
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    nlohmann::json j;
    double total = 0;
    for (const char* k : {"speed_violations", "divergence_violations", "jacobian_violations"}) {
      double s = 0;
      for (double v : column(trials, k)) s += v;
      j[k] = s;
      total += s;
    }
    const auto sp = column(trials, "max_speed");
    j["max_speed"] = sp.empty() ? 0.0 : *std::max_element(sp.begin(), sp.end());
    j["speed_bound"] = compute_bounds(spec_).speed;
    j["pass"] = total == 0 && !completed(trials).empty();
    return j;
  }

 private:
  FieldSpec spec_;
  int trials_;
  long long samples_;
  double box_;
};

// ---- percolation-tail ----

class PercolationTail : public Experiment {
 public:
  PercolationTail(const ExperimentSetup& s, int dim) : dim_(dim) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    p_ = s.params.real("p");
    size_ = s.params.integer("set_size");
    shape_ = s.params.text("set_shape");
    margin_ = s.params.integer("margin");
    min_count_ = s.params.integer("min_count");
    need(trials_ >= 2, "percolation-tail.params.trials: must be >= 2");
    need(p_ >= 0 && p_ <= 1, "percolation-tail.params.p: must lie in [0, 1]");
    need(size_ >= 1, "percolation-tail.params.set_size: must be >= 1");
    need(shape_ == "line" || shape_ == "random", "percolation-tail.params.set_shape: must be line or random");
    need(margin_ >= 1, "percolation-tail.params.margin: must be >= 1");
    need(min_count_ >= 1, "percolation-tail.params.min_count: must be >= 1");
    R_ = (size_ + 1) / 2 + margin_;
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const SiteLattice lat = iid_lattice(dim_, R_, p_, seed);
    std::vector<std::size_t> S;
    if (shape_ == "line") {
      for (long i = 0; i < size_; ++i) S.push_back(lat.window.index({i - size_ / 2, 0, 0}));
    } else {
      S = random_connected_set(lat.window, static_cast<std::size_t>(size_), hash_combine(seed, 2));
    }
    const double cl = static_cast<double>(cl_of(lat, S).size());
    return {{seed, "cl_size", cl}, {seed, "excess", cl - static_cast<double>(size_)}};
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    const auto cl = column(trials, "cl_size");
    const double N = static_cast<double>(cl.size());
    std::vector<double> delta, logp;
    nlohmann::json tail = nlohmann::json::array();
    for (long k = 0;; ++k) {
      const double count = static_cast<double>(std::count_if(cl.begin(), cl.end(), [&](double c) { return c > k; }));
      if (count < static_cast<double>(min_count_)) break;
      delta.push_back(static_cast<double>(k - size_));
      logp.push_back(std::log(count / N));
      tail.push_back({{"delta", k - size_}, {"count", count}, {"probability", count / N}});
    }
    nlohmann::json j;
    j["tail"] = tail;
    j["mean_cl_size"] = cl.empty() ? 0.0 : mean(cl);
    if (delta.size() >= 3) {
      const LineFit f = fit_line(delta, logp);
      j["slope"] = f.slope;
      j["intercept"] = f.intercept;
      j["r2"] = f.r2;
      j["points"] = f.n;
      j["pass"] = f.r2 >= 0.9 && f.slope < 0;
    } else {
      j["slope"] = nullptr;
      j["pass"] = false;
      j["note"] = "fewer than 3 tail points above min_count";
    }
    return j;
  }

 private:
  int dim_;
  int trials_;
  double p_;
  long size_;
  std::string shape_;
  long margin_, min_count_, R_;
};

// ---- unicoherence ----

class Unicoherence : public Experiment {
 public:
  Unicoherence(const ExperimentSetup& s, int dim) : dim_(dim) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    side_ = s.params.integer("side");
    max_size_ = s.params.integer("max_size");
    need(trials_ >= 1, "unicoherence.params.trials: must be >= 1");
    need(side_ >= 1, "unicoherence.params.side: must be >= 1");
    const auto sites = static_cast<long long>(std::pow(side_, dim_));
    if (max_size_ == 0) max_size_ = std::max(1LL, sites / 2);
    need(max_size_ >= 1 && max_size_ <= sites, "unicoherence.params.max_size: must lie in 1..side^d");
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const LatticeWindow win(dim_, {0, 0, 0}, {side_, side_, dim_ == 3 ? side_ : 1});
    Stream rng(hash_combine(seed, 3));
    const auto size = static_cast<std::size_t>(1 + rng.below(max_size_));
    const auto C = random_connected_set(win, size, rng.next());
    const auto rep = check_unicoherence(win, C);
    return {{seed, "set_size", static_cast<double>(size)},
            {seed, "components", static_cast<double>(rep.components)},
            {seed, "pass", rep.pass ? 1.0 : 0.0}};
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    const auto pass = column(trials, "pass");
    const double ok = static_cast<double>(std::count(pass.begin(), pass.end(), 1.0));
    nlohmann::json j;
    j["checked"] = pass.size();
    j["failures"] = static_cast<double>(pass.size()) - ok;
    j["pass_rate"] = pass.empty() ? 0.0 : ok / static_cast<double>(pass.size());
    j["pass"] = !pass.empty() && ok == static_cast<double>(pass.size());
    return j;
  }

 private:
  int dim_;
  int trials_;
  long side_;
  long long max_size_;
};

// ---- detour ----

class Detour : public Experiment {
 public:
  Detour(const ExperimentSetup& s, int dim) : dim_(dim) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    p_ = s.params.real("p");
    R_ = s.params.integer("radius");
    need(trials_ >= 1, "detour.params.trials: must be >= 1");
    need(p_ > 0 && p_ <= 1, "detour.params.p: must lie in (0, 1]");
    need(R_ >= 2, "detour.params.radius: must be >= 2");
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const SiteLattice lat = iid_lattice(dim_, R_, p_, seed);
    const auto dec = clusters(lat);
    std::int32_t best = -1;
    for (std::size_t c = 0; c < dec.size.size(); ++c)
      if (dec.open[c] && (best < 0 || dec.size[c] > dec.size[static_cast<std::size_t>(best)]))
        best = static_cast<std::int32_t>(c);
    if (best < 0) throw Error(ErrorCode::Domain, "no open cluster");
    const auto members = dec.members(best);
    Stream rng(hash_combine(seed, 4));
    auto pick = [&] {
      const Site s = lat.window.site(members[static_cast<std::size_t>(rng.below(static_cast<long>(members.size())))]);
      return Vec{double(s[0]), double(s[1]), double(s[2])};
    };
    const Vec x = pick(), y = pick();
    const SkeletonPath path = detour_skeleton(lat, x, y);
    const bool step_ok = path.max_step() <= std::sqrt(double(dim_)) + 1e-9;
    const bool count_ok = static_cast<double>(path.steps()) <= path.count_bound;
    const bool ok = step_ok && count_ok && !path.revisited;
    return {{seed, "distance", norm(y - x)},
            {seed, "steps", static_cast<double>(path.steps())},
            {seed, "max_step", path.max_step()},
            {seed, "count_bound", path.count_bound},
            {seed, "detours", static_cast<double>(path.detour_components.size())},
            {seed, "revisited", path.revisited ? 1.0 : 0.0},
            {seed, "fallbacks", static_cast<double>(path.fallbacks)},
            {seed, "compliant", ok ? 1.0 : 0.0}};
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    const auto ok = column(trials, "compliant");
    const double good = static_cast<double>(std::count(ok.begin(), ok.end(), 1.0));
    double fallbacks = 0, revisits = 0;
    for (double v : column(trials, "fallbacks")) fallbacks += v;
    for (double v : column(trials, "revisited")) revisits += v;
    nlohmann::json j;
    j["checked"] = ok.size();
    j["compliance"] = ok.empty() ? 0.0 : good / static_cast<double>(ok.size());
    j["revisits"] = revisits;
    j["fallbacks"] = fallbacks;
    j["failed_trials"] = trials.size() - ok.size();
    j["pass"] = !ok.empty() && good == static_cast<double>(ok.size()) && ok.size() == trials.size();
    return j;
  }

 private:
  int dim_;
  int trials_;
  double p_;
  long R_;
};

// ---- giant-cluster ----

class GiantCluster : public Experiment {
 public:
  GiantCluster(const ExperimentSetup& s, int dim) : dim_(dim) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    p_ = s.params.real("p");
    R_ = s.params.integer("R");
    n_ = s.params.integer("n");
    need(trials_ >= 1, "giant-cluster.params.trials: must be >= 1");
    need(p_ >= 0 && p_ <= 1, "giant-cluster.params.p: must lie in [0, 1]");
    need(R_ >= 1 && n_ >= 1, "giant-cluster.params: R and n must be >= 1");
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const SiteLattice lat = iid_lattice(dim_, R_ + n_, p_, seed);
    return {{seed, "event", giant_cluster_event(lat, R_, n_) ? 1.0 : 0.0},
            {seed, "open_fraction", lat.open_fraction()}};
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    const auto ev = column(trials, "event");
    nlohmann::json j;
    const double P = ev.empty() ? 0.0 : mean(ev);
    j["probability"] = P;
    j["std_error"] = ev.size() > 1 ? std::sqrt(P * (1 - P) / static_cast<double>(ev.size())) : 0.0;
    j["trials"] = ev.size();
    return j;
  }

 private:
  int dim_;
  int trials_;
  double p_;
  long R_, n_;
};

int lattice_dim(const ExperimentSetup& s) {
  need(s.field.dim == 2 || s.field.dim == 3, "field.dimension: must be 2 or 3");
  return s.field.dim;
}

}  // namespace

std::unique_ptr<Experiment> make_field_check(const ExperimentSetup& s) { return std::make_unique<FieldCheck>(s); }
std::unique_ptr<Experiment> make_percolation_tail(const ExperimentSetup& s) {
  return std::make_unique<PercolationTail>(s, lattice_dim(s));
}
std::unique_ptr<Experiment> make_unicoherence(const ExperimentSetup& s) {
  return std::make_unique<Unicoherence>(s, lattice_dim(s));
}
std::unique_ptr<Experiment> make_detour(const ExperimentSetup& s) { return std::make_unique<Detour>(s, lattice_dim(s)); }
std::unique_ptr<Experiment> make_giant_cluster(const ExperimentSetup& s) {
  return std::make_unique<GiantCluster>(s, lattice_dim(s));
}

}  // namespace ghomog::detail
