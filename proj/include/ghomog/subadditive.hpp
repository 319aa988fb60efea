#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ghomog/common.hpp"

namespace ghomog {

using Rational = boost::multiprecision::cpp_rational;
using RVec = std::array<Rational, 3>;

// ---- rearrangement ---------------------------------------------------------

struct RearrangeResult {
  std::vector<std::size_t> order;  // order[k] = index placed at position k
  double max_deviation = 0;        // max_k |sum_{i<=k} v_order[i] - k x|
};

/// Orders v_1..v_n (|v_i| <= 1, sum = n x) so every prefix stays within 2d of the
/// line k x. Peels one vector at a time off the end while keeping a coefficient
/// certificate alpha in [0,1]^n with sum alpha_i v_i = (n-d) x, sum alpha_i = n-d.
/// Floating-point version: inputs checked to 1e-9.
RearrangeResult rearrange(const std::vector<Vec>& v, const Vec& x, int dim);
/// Exact version over rationals; the unit-ball condition is checked exactly too.
RearrangeResult rearrange_exact(const std::vector<RVec>& v, const RVec& x, int dim);

double max_prefix_deviation(const std::vector<Vec>& v, const Vec& x, const std::vector<std::size_t>& order);
/// Smallest achievable max prefix deviation over all orders (n <= 10).
double best_prefix_deviation(const std::vector<Vec>& v, const Vec& x);

// ---- convex hulls ----------------------------------------------------------

struct WeightedPoints {
  std::vector<std::size_t> index;  // into the input list
  std::vector<double> weight;      // >= 0, summing to 1
};

/// Convex weights on at most d + 1 input points reproducing `target` to 1e-9.
/// Throws Error(Domain) if target lies outside the hull.
WeightedPoints caratheodory(const std::vector<Vec>& points, const Vec& target, int dim);

// ---- subadditive oracles ---------------------------------------------------

/// f on Z^d, its homogeneous limit fbar, and the slope of a supporting linear
/// functional fbar_x(v) = slope(x) . v chosen so slope(a x) = slope(x) for a > 0.
struct SubadditiveOracle {
  std::string name;
  int dim = 2;
  double growth = 1;  // f(x) <= growth |x|
  std::function<double(const Vec&)> f;
  std::function<double(const Vec&)> fbar;
  std::function<Vec(const Vec&)> slope;

  double fbar_x(const Vec& x, const Vec& v) const { return dot(slope(x), v); }
};

using OracleFactory = std::function<SubadditiveOracle(int dim)>;

/// Name -> factory table; built-ins: "sqrt" (|v| + sqrt|v|), "log" (|v| + log(2+|v|)),
/// "norm" (|v|, exactly additive along rays). All have fbar = |.|.
class OracleRegistry {
 public:
  static OracleRegistry& instance();
  void add(const std::string& name, OracleFactory factory);
  SubadditiveOracle make(const std::string& name, int dim) const;
  std::vector<std::string> names() const;

 private:
  OracleRegistry();
  std::map<std::string, OracleFactory> factories_;
};

/// G_x = {v : |v| <= K|x|, fbar_x(v) <= fbar_x(x), f(v) <= fbar_x(v) + C|x|^nu phi(|x|)}.
struct GoodSet {
  const SubadditiveOracle* oracle = nullptr;
  Vec x{};
  double nu = 0.5;
  double C = 1;
  double K = 1;
  std::function<double(double)> phi = [](double) { return 1.0; };

  double allowance() const { return C * std::pow(norm(x), nu) * phi(norm(x)); }
  /// Empty string if v is good, else the violated condition.
  std::string violation(const Vec& v) const;
  bool contains(const Vec& v) const { return violation(v).empty(); }
};

struct HullCertificate {
  Vec x{};
  int n = 0;           // skeleton spans n x
  std::size_t m = 0;   // number of increments
  double alpha = 0;    // n / m
  std::vector<Vec> points;   // <= d + 1 increments whose hull holds alpha x
  std::vector<double> weights;
};

/// Step 1: a G_x-skeleton 0 = v_0, ..., v_m = n x shows alpha x in conv(G_x) with
/// alpha = n/m. Checks every increment (Error(Certificate) naming the index) and
/// that m >= n via fbar_x.
HullCertificate alexander_step1(const GoodSet& good, const std::vector<Vec>& skeleton, int n);

struct ReduceReport {
  Vec z{};
  std::vector<Vec> increments;
  double t = 0;
  double lhs = 0;            // f(tx) - fbar(tx)
  double rhs = 0;            // f(z) - fbar_x(z) + sum (f(v_k) - fbar_x(v_k))
  double increment_gap = 0;  // sum (f(v_k) - fbar_x(v_k))
  double constant = 0;       // increment_gap / t
  double z_norm = 0;
  double z_bound = 0;        // (d + 1) K |x|
  bool holds = false;        // lhs <= rhs and z_norm <= z_bound
};

/// Step 2: tx = z + sum v_k by the floor/remainder split of (t/alpha) p_i.
ReduceReport alexander_reduce(const GoodSet& good, const HullCertificate& cert, const Vec& x, double t);

using SkeletonCallback = std::function<std::vector<Vec>(const Vec& x)>;

struct GapLevel {
  int level = 0;
  double radius = 0;
  double sup_gap = 0;         // sup_{|x| <= radius} (f - fbar)
  double sup_normalized = 0;  // sup (f - fbar) / (|x|^nu phi(|x|)), |x| >= 1
  double slack = 0;           // sup_gap - previous sup_gap
  double slack_normalized = 0;
  double skeleton_constant = 0;  // worst increment gap / (|x|^nu phi) over checked skeletons
};

struct GapReport {
  std::string oracle;
  double nu = 0.5;
  double M = 2;
  std::vector<GapLevel> levels;
  double bound_constant = 0;  // max sup_normalized
  std::string to_json() const;
};

/// Doubling induction over radii K M^k, k = 0..levels. At every level the
/// skeleton callback is queried at lattice points of norm ~ radius; subadditivity
/// bounds f(x) - fbar(x) by the skeleton's increment gap sum (f(v_k) - fbar_x(v_k)).
GapReport gap_from_skeleton(const SubadditiveOracle& oracle, double nu, const std::function<double(double)>& phi,
                            double M, double K, int levels, const SkeletonCallback& skeleton);

/// Unit-step skeleton along the rounded straight line from 0 to x.
std::vector<Vec> greedy_unit_skeleton(const Vec& x, int dim);

}  // namespace ghomog
