#include <algorithm>
#include <cmath>

#include "exp_internal.hpp"
#include "ghomog/stats.hpp"
#include "ghomog/subadditive.hpp"

namespace ghomog::detail {

namespace {

void need(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Config, what);
}

class Rearrange : public Experiment {
 public:
  explicit Rearrange(const ExperimentSetup& s) {
    trials_ = static_cast<int>(s.params.integer("trials"));
    for (double d : s.params.reals("dims")) {
      need(d == 2 || d == 3, "rearrange.params.dims: entries must be 2 or 3");
      dims_.push_back(static_cast<int>(d));
    }
    n_max_ = s.params.integer("n_max");
    exhaustive_max_ = s.params.integer("exhaustive_max");
    exact_ = s.params.flag("exact");
    need(trials_ >= 1, "rearrange.params.trials: must be >= 1");
    need(!dims_.empty(), "rearrange.params.dims: must not be empty");
    need(n_max_ >= 1, "rearrange.params.n_max: must be >= 1");
    need(exhaustive_max_ >= 0 && exhaustive_max_ <= 10, "rearrange.params.exhaustive_max: must lie in 0..10");
  }
  int trials() const override { return trials_; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    Stream rng(hash_combine(seed, 5));
    const int d = dims_[static_cast<std::size_t>(rng.below(static_cast<long>(dims_.size())))];
    const auto n = static_cast<std::size_t>(1 + rng.below(n_max_));
    std::vector<Vec> v;
    RearrangeResult res;
    Vec x{0, 0, 0};
    if (exact_) {
      // Grid points k/64 inside the unit ball.
      std::vector<RVec> rv;
      RVec rx{0, 0, 0};
      while (rv.size() < n) {
        RVec c{0, 0, 0};
        long sq = 0;
        for (int i = 0; i < d; ++i) {
          const long k = rng.below(129) - 64;
          c[i] = Rational(k, 64);
          sq += k * k;
        }
        if (sq > 64 * 64) continue;
        rv.push_back(c);
        for (int i = 0; i < 3; ++i) rx[i] += c[i];
      }
      for (int i = 0; i < 3; ++i) rx[i] /= static_cast<long>(n);
      res = rearrange_exact(rv, rx, d);
      for (const auto& c : rv) v.push_back({c[0].convert_to<double>(), c[1].convert_to<double>(), c[2].convert_to<double>()});
      x = {rx[0].convert_to<double>(), rx[1].convert_to<double>(), rx[2].convert_to<double>()};
    } else {
      while (v.size() < n) {
        Vec c{0, 0, 0};
        for (int i = 0; i < d; ++i) c[i] = rng.uniform(-1, 1);
        if (norm(c) <= 1) v.push_back(c);
      }
      for (const Vec& c : v) x = x + c;
      x = (1.0 / static_cast<double>(n)) * x;
      res = rearrange(v, x, d);
    }
    const double bound = 2.0 * d;
    std::vector<Row> rows{{seed, "dim", double(d)},
                          {seed, "n", double(n)},
                          {seed, "max_deviation", res.max_deviation},
                          {seed, "bound_ok", res.max_deviation <= bound + 1e-9 ? 1.0 : 0.0}};
    if (static_cast<long long>(n) <= exhaustive_max_) {
      const double best = best_prefix_deviation(v, x);
      rows.push_back({seed, "exhaustive_best", best});
      rows.push_back({seed, "exhaustive_ok", best <= res.max_deviation + 1e-9 && best <= bound + 1e-9 ? 1.0 : 0.0});
    }
    return rows;
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    const auto ok = column(trials, "bound_ok");
    double good = 0, ex = 0, ex_good = 0, worst = 0;
    for (const auto* t : completed(trials)) {
      good += t->value("bound_ok");
      worst = std::max(worst, t->value("max_deviation") / (2 * t->value("dim")));
      for (const auto& r : t->rows)
        if (r.parameter == "exhaustive_ok") {
          ++ex;
          ex_good += r.value;
        }
    }
    nlohmann::json j;
    j["instances"] = ok.size();
    j["compliance"] = ok.empty() ? 0.0 : good / static_cast<double>(ok.size());
    j["worst_ratio_to_bound"] = worst;
    j["exhaustive_checked"] = ex;
    j["exhaustive_compliance"] = ex > 0 ? ex_good / ex : 1.0;
    j["failed_trials"] = trials.size() - ok.size();
    j["pass"] = !ok.empty() && ok.size() == trials.size() && good == static_cast<double>(ok.size()) && ex_good == ex;
    return j;
  }

 private:
  int trials_;
  std::vector<int> dims_;
  long n_max_;
  long long exhaustive_max_;
  bool exact_;
};

class SkeletonGap : public Experiment {
 public:
  explicit SkeletonGap(const ExperimentSetup& s) : dim_(s.field.dim) {
    oracle_ = s.params.text("oracle");
    nu_ = s.params.real("nu");
    M_ = s.params.real("M");
    K_ = s.params.real("K");
    levels_ = static_cast<int>(s.params.integer("levels"));
    const auto names = OracleRegistry::instance().names();
    need(std::find(names.begin(), names.end(), oracle_) != names.end(),
         "skeleton-gap.params.oracle: unknown oracle '" + oracle_ + "'");
    need(nu_ > 0 && nu_ < 1, "skeleton-gap.params.nu: must lie in (0, 1)");
    need(M_ > 1, "skeleton-gap.params.M: must be > 1");
    need(K_ >= 1, "skeleton-gap.params.K: must be >= 1");
    need(levels_ >= 1 && levels_ <= 12, "skeleton-gap.params.levels: must lie in 1..12");
    need(dim_ == 2 || dim_ == 3, "field.dimension: must be 2 or 3");
  }
  int trials() const override { return 1; }

  std::vector<Row> trial(int, std::uint64_t seed) const override {
    const SubadditiveOracle o = OracleRegistry::instance().make(oracle_, dim_);
    const int d = dim_;
    const GapReport rep = gap_from_skeleton(
        o, nu_, [](double) { return 1.0; }, M_, K_, levels_,
        [d](const Vec& x) { return greedy_unit_skeleton(x, d); });
    std::vector<Row> rows;
    for (const auto& L : rep.levels) {
      const std::string k = "level" + std::to_string(L.level) + "_";
      rows.push_back({seed, k + "radius", L.radius});
      rows.push_back({seed, k + "sup_gap", L.sup_gap});
      rows.push_back({seed, k + "sup_normalized", L.sup_normalized});
      rows.push_back({seed, k + "slack", L.slack});
      rows.push_back({seed, k + "skeleton_constant", L.skeleton_constant});
    }
    rows.push_back({seed, "bound_constant", rep.bound_constant});
    return rows;
  }

  nlohmann::json summarize(const std::vector<TrialResult>& trials) const override {
    nlohmann::json j;
    const auto done = completed(trials);
    if (done.empty()) {
      j["pass"] = false;
      return j;
    }
    const TrialResult& t = *done.front();
    double max_slack = 0;
    nlohmann::json levels = nlohmann::json::array();
    for (int l = 0; l <= levels_; ++l) {
      const std::string k = "level" + std::to_string(l) + "_";
      bool present = false;
      for (const auto& r : t.rows) present = present || r.parameter == k + "radius";
      if (!present) continue;
      levels.push_back({{"level", l},
                        {"radius", t.value(k + "radius")},
                        {"sup_normalized", t.value(k + "sup_normalized")},
                        {"slack", t.value(k + "slack")}});
      max_slack = std::max(max_slack, std::abs(t.value(k + "slack")));
    }
    j["oracle"] = oracle_;
    j["levels"] = levels;
    j["bound_constant"] = t.value("bound_constant");
    j["max_abs_slack"] = max_slack;
    return j;
  }

 private:
  int dim_;
  std::string oracle_;
  double nu_, M_, K_;
  int levels_;
};

}  // namespace

std::unique_ptr<Experiment> make_rearrange(const ExperimentSetup& s) { return std::make_unique<Rearrange>(s); }
std::unique_ptr<Experiment> make_skeleton_gap(const ExperimentSetup& s) { return std::make_unique<SkeletonGap>(s); }

}  // namespace ghomog::detail
