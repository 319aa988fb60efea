#include "ghomog/subadditive.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>

#include "ghomog/grid.hpp"

namespace ghomog {

namespace {

// ---- scalar traits for the two rearrangement paths --------------------------

template <class T>
struct Num;

template <>
struct Num<double> {
  static constexpr double tol = 1e-12;
  static bool zero(double v) { return std::abs(v) <= tol; }
  static bool positive(double v) { return v > tol; }
  static double to_double(double v) { return v; }
  static double mag(double v) { return std::abs(v); }
  static bool certified_zero(double v) { return std::abs(v) <= 1e-7; }
};

template <>
struct Num<Rational> {
  static bool zero(const Rational& v) { return v == 0; }
  static bool positive(const Rational& v) { return v > 0; }
  static double to_double(const Rational& v) { return static_cast<double>(v); }
  static double mag(const Rational& v) { return std::abs(static_cast<double>(v)); }
  static bool certified_zero(const Rational& v) { return v == 0; }
};

template <class T>
using TVec = std::array<T, 3>;

// Nonzero kernel vector of a rows x cols matrix (cols > rows), Gauss-Jordan.
template <class T>
std::vector<T> kernel_vector(std::vector<std::vector<T>> a, std::size_t cols) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    for (std::size_t i = r; i < rows; ++i)
      if (Num<T>::mag(a[i][c]) > Num<T>::mag(a[best][c])) best = i;
    if (Num<T>::zero(a[best][c])) continue;
    std::swap(a[r], a[best]);
    const T p = a[r][c];
    for (std::size_t j = 0; j < cols; ++j) a[r][j] /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || Num<T>::zero(a[i][c])) continue;
      const T f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  std::size_t free_col = cols;
  for (std::size_t c = 0; c < cols; ++c)
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  std::vector<T> k(cols, T(0));
  k[free_col] = T(1);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) k[pivot_col[i]] = -a[i][free_col];
  return k;
}

template <class T>
std::vector<std::size_t> rearrange_impl(const std::vector<TVec<T>>& v, const TVec<T>& x, int d) {
  const std::size_t n = v.size();
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::size_t> tail;
  if (n <= static_cast<std::size_t>(d)) return active;

  // alpha over `active`, indexed by position in `active`.
  std::vector<T> alpha(n, T(static_cast<long>(n - d)) / T(static_cast<long>(n)));
  auto check = [&](const std::vector<T>& coef, long level) {
    TVec<T> s{T(0), T(0), T(0)};
    T total(0);
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (Num<T>::positive(-coef[j]) || Num<T>::positive(coef[j] - T(1)))
        throw Error(ErrorCode::Certificate, "rearrange: coefficient left [0, 1]");
      for (int i = 0; i < d; ++i) s[i] += coef[j] * v[active[j]][i];
      total += coef[j];
    }
    for (int i = 0; i < d; ++i)
      if (!Num<T>::certified_zero(s[i] - T(level) * x[i]))
        throw Error(ErrorCode::Certificate, "rearrange: certificate equation violated");
    if (!Num<T>::certified_zero(total - T(level)))
      throw Error(ErrorCode::Certificate, "rearrange: certificate sum violated");
  };

  while (active.size() > static_cast<std::size_t>(d)) {
    const long na = static_cast<long>(active.size());
    std::vector<T> y(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) y[j] = alpha[j] * T(na - d - 1) / T(na - d);

    // Walk along kernel directions until at most d + 1 coordinates are fractional.
    for (;;) {
      std::vector<std::size_t> frac;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (Num<T>::positive(y[j]) && Num<T>::positive(T(1) - y[j])) frac.push_back(j);
      if (frac.size() <= static_cast<std::size_t>(d + 1)) break;
      frac.resize(static_cast<std::size_t>(d + 2));
      std::vector<std::vector<T>> a(static_cast<std::size_t>(d + 1), std::vector<T>(frac.size()));
      for (std::size_t c = 0; c < frac.size(); ++c) {
        for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i)][c] = v[active[frac[c]]][i];
        a[static_cast<std::size_t>(d)][c] = T(1);
      }
      const auto k = kernel_vector(a, frac.size());
      bool have = false;
      T step(0);
      std::size_t hit = 0;
      for (std::size_t c = 0; c < frac.size(); ++c) {
        if (Num<T>::zero(k[c])) continue;
        const T room = Num<T>::positive(k[c]) ? (T(1) - y[frac[c]]) / k[c] : y[frac[c]] / (-k[c]);
        if (!have || room < step) {
          have = true;
          step = room;
          hit = c;
        }
      }
      if (!have) throw Error(ErrorCode::Certificate, "rearrange: degenerate kernel");
      for (std::size_t c = 0; c < frac.size(); ++c) y[frac[c]] += step * k[c];
      y[frac[hit]] = Num<T>::positive(k[hit]) ? T(1) : T(0);
      for (std::size_t c = 0; c < frac.size(); ++c) {
        if (Num<T>::zero(y[frac[c]])) y[frac[c]] = T(0);
        if (Num<T>::zero(y[frac[c]] - T(1))) y[frac[c]] = T(1);
      }
    }

    std::size_t drop = y.size();
    for (std::size_t j = 0; j < y.size(); ++j)
      if (Num<T>::zero(y[j])) {
        drop = j;
        break;
      }
    if (drop == y.size()) throw Error(ErrorCode::Certificate, "rearrange: no zero coefficient in basic solution");
    tail.push_back(active[drop]);
    active.erase(active.begin() + static_cast<long>(drop));
    y.erase(y.begin() + static_cast<long>(drop));
    alpha = y;
    check(alpha, static_cast<long>(active.size()) - d);
  }
  std::vector<std::size_t> order = active;
  order.insert(order.end(), tail.rbegin(), tail.rend());
  return order;
}

}  // namespace

double max_prefix_deviation(const std::vector<Vec>& v, const Vec& x, const std::vector<std::size_t>& order) {
  Vec s{0, 0, 0};
  double worst = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    s = s + v.at(order[k]);
    worst = std::max(worst, norm(s - static_cast<double>(k + 1) * x));
  }
  return worst;
}

RearrangeResult rearrange(const std::vector<Vec>& v, const Vec& x, int dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "rearrange: dimension must be 2 or 3");
  Vec total{0, 0, 0};
  for (const Vec& u : v) {
    if (norm(u) > 1 + 1e-9) throw Error(ErrorCode::InvalidArgument, "rearrange: vector outside the unit ball");
    total = total + u;
  }
  if (norm(total - static_cast<double>(v.size()) * x) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "rearrange: vectors do not sum to n x");
  RearrangeResult out;
  out.order = rearrange_impl<double>(v, x, dim);
  out.max_deviation = max_prefix_deviation(v, x, out.order);
  return out;
}

RearrangeResult rearrange_exact(const std::vector<RVec>& v, const RVec& x, int dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "rearrange: dimension must be 2 or 3");
  RVec total{0, 0, 0};
  for (const RVec& u : v) {
    Rational sq = 0;
    for (int i = 0; i < dim; ++i) {
      sq += u[i] * u[i];
      total[i] += u[i];
    }
    if (sq > 1) throw Error(ErrorCode::InvalidArgument, "rearrange: vector outside the unit ball");
  }
  for (int i = 0; i < dim; ++i)
    if (total[i] != Rational(static_cast<long>(v.size())) * x[i])
      throw Error(ErrorCode::InvalidArgument, "rearrange: vectors do not sum to n x");
  RearrangeResult out;
  out.order = rearrange_impl<Rational>(v, x, dim);
  std::vector<Vec> vd;
  for (const RVec& u : v) vd.push_back({static_cast<double>(u[0]), static_cast<double>(u[1]), static_cast<double>(u[2])});
  out.max_deviation = max_prefix_deviation(
      vd, {static_cast<double>(x[0]), static_cast<double>(x[1]), static_cast<double>(x[2])}, out.order);
  return out;
}

double best_prefix_deviation(const std::vector<Vec>& v, const Vec& x) {
  const std::size_t n = v.size();
  if (n > 10) throw Error(ErrorCode::InvalidArgument, "exhaustive permutation search limited to n <= 10");
  double best = INFINITY;
  std::vector<bool> used(n, false);
  std::function<void(std::size_t, Vec, double)> go = [&](std::size_t k, Vec s, double worst) {
    if (worst >= best) return;
    if (k == n) {
      best = worst;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      const Vec t = s + v[i];
      go(k + 1, t, std::max(worst, norm(t - static_cast<double>(k + 1) * x)));
      used[i] = false;
    }
  };
  go(0, {0, 0, 0}, 0);
  return best;
}

// ---- convex hulls ----------------------------------------------------------

namespace {

// Lawson-Hanson non-negative least squares.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());
  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Ap.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < cols.size(); ++c) z(cols[c]) = zp(static_cast<Eigen::Index>(c));
    return z;
  };
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index pick = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        pick = j;
      }
    if (pick < 0) break;
    passive[static_cast<std::size_t>(pick)] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double step = 1;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0) step = std::min(step, x(j) / (x(j) - z(j)));
      x = x + step * (z - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0;
        }
    }
  }
  return x;
}

}  // namespace

WeightedPoints caratheodory(const std::vector<Vec>& points, const Vec& target, int dim) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "caratheodory: no points");
  for (std::size_t i = 0; i < points.size(); ++i)
    if (norm(points[i] - target) <= 1e-12) return {{i}, {1.0}};

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(dim + 1, n);
  Eigen::VectorXd b(dim + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int i = 0; i < dim; ++i) A(i, j) = points[static_cast<std::size_t>(j)][i];
    A(dim, j) = 1;
  }
  for (int i = 0; i < dim; ++i) b(i) = target[i];
  b(dim) = 1;
  Eigen::VectorXd w = nnls(A, b);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A * w - b).norm() > 1e-9 * scale) throw Error(ErrorCode::Domain, "caratheodory: target outside the convex hull");

  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < n; ++j)
    if (w(j) > 0) support.push_back(j);
  while (support.size() > static_cast<std::size_t>(dim + 1)) {
    Eigen::MatrixXd S(dim + 1, static_cast<Eigen::Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) S.col(static_cast<Eigen::Index>(c)) = A.col(support[c]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    Eigen::VectorXd k = lu.kernel().col(0);
    if (k.maxCoeff() <= 0) k = -k;
    double step = INFINITY;
    std::size_t hit = 0;
    for (std::size_t c = 0; c < support.size(); ++c) {
      const double kc = k(static_cast<Eigen::Index>(c));
      if (kc > 1e-14 && w(support[c]) / kc < step) {
        step = w(support[c]) / kc;
        hit = c;
      }
    }
    for (std::size_t c = 0; c < support.size(); ++c) w(support[c]) -= step * k(static_cast<Eigen::Index>(c));
    w(support[hit]) = 0;
    std::vector<Eigen::Index> next;
    for (Eigen::Index j : support)
      if (w(j) > 1e-15) next.push_back(j);
      else w(j) = 0;
    support = next;
  }
  WeightedPoints out;
  double total = 0;
  for (Eigen::Index j : support) total += w(j);
  for (Eigen::Index j : support) {
    out.index.push_back(static_cast<std::size_t>(j));
    out.weight.push_back(w(j) / total);
  }
  Vec rebuilt{0, 0, 0};
  for (std::size_t c = 0; c < out.index.size(); ++c) rebuilt = rebuilt + out.weight[c] * points[out.index[c]];
  if (norm(rebuilt - target) > 1e-9 * scale)
    throw Error(ErrorCode::Certificate, "caratheodory: reduced weights do not reproduce the target");
  return out;
}

// ---- oracles ---------------------------------------------------------------

namespace {

Vec unit_slope(const Vec& x) {
  const double r = norm(x);
  return r > 0 ? (1.0 / r) * x : Vec{0, 0, 0};
}

SubadditiveOracle radial(const std::string& name, int dim, double growth, std::function<double(double)> g) {
  SubadditiveOracle o;
  o.name = name;
  o.dim = dim;
  o.growth = growth;
  o.f = [g](const Vec& v) { return norm(v) + g(norm(v)); };
  o.fbar = [](const Vec& v) { return norm(v); };
  o.slope = unit_slope;
  return o;
}

}  // namespace

OracleRegistry::OracleRegistry() {
  add("sqrt", [](int d) { return radial("sqrt", d, 2, [](double r) { return std::sqrt(r); }); });
  add("log", [](int d) { return radial("log", d, 1 + std::log(3.0), [](double r) { return std::log(2 + r); }); });
  add("norm", [](int d) { return radial("norm", d, 1, [](double) { return 0.0; }); });
}

OracleRegistry& OracleRegistry::instance() {
  static OracleRegistry registry;
  return registry;
}

void OracleRegistry::add(const std::string& name, OracleFactory factory) { factories_[name] = std::move(factory); }

SubadditiveOracle OracleRegistry::make(const std::string& name, int dim) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw Error(ErrorCode::InvalidArgument, "unknown subadditive oracle '" + name + "'");
  return it->second(dim);
}

std::vector<std::string> OracleRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : factories_) out.push_back(k);
  return out;
}

// ---- Alexander steps -------------------------------------------------------

std::string GoodSet::violation(const Vec& v) const {
  const double tol = 1e-9;
  if (norm(v) > K * norm(x) + tol) return "|v| exceeds K|x|";
  const double gain = oracle->fbar_x(x, v);
  if (gain > oracle->fbar_x(x, x) + tol) return "overshoots fbar_x(x)";
  if (oracle->f(v) > gain + allowance() + tol) return "f(v) exceeds fbar_x(v) + C|x|^nu phi(|x|)";
  return "";
}

HullCertificate alexander_step1(const GoodSet& good, const std::vector<Vec>& skeleton, int n) {
  if (!good.oracle) throw Error(ErrorCode::InvalidArgument, "good set has no oracle");
  if (n < 1 || skeleton.size() < 2) throw Error(ErrorCode::InvalidArgument, "skeleton needs n >= 1 and >= 2 points");
  const double tol = 1e-9;
  if (norm(skeleton.front()) > tol) throw Error(ErrorCode::InvalidArgument, "skeleton must start at 0");
  if (norm(skeleton.back() - static_cast<double>(n) * good.x) > tol * std::max(1.0, norm(good.x) * n))
    throw Error(ErrorCode::InvalidArgument, "skeleton must end at n x");

  std::vector<Vec> inc;
  double progress = 0;
  for (std::size_t k = 1; k < skeleton.size(); ++k) {
    const Vec v = skeleton[k] - skeleton[k - 1];
    const std::string why = good.violation(v);
    if (!why.empty()) throw Error(ErrorCode::Certificate, "skeleton increment " + std::to_string(k) + ": " + why);
    progress += good.oracle->fbar_x(good.x, v);
    inc.push_back(v);
  }
  const double unit = good.oracle->fbar_x(good.x, good.x);
  if (std::abs(progress - n * unit) > 1e-7 * std::max(1.0, std::abs(n * unit)))
    throw Error(ErrorCode::Certificate, "increments do not add up to fbar_x(n x)");
  if (inc.size() < static_cast<std::size_t>(n) && unit > 0)
    throw Error(ErrorCode::Certificate, "fewer increments than n despite fbar_x(v) <= fbar_x(x)");

  HullCertificate cert;
  cert.x = good.x;
  cert.n = n;
  cert.m = inc.size();
  cert.alpha = static_cast<double>(n) / static_cast<double>(inc.size());
  std::vector<Vec> distinct;
  for (const Vec& v : inc)
    if (std::none_of(distinct.begin(), distinct.end(), [&](const Vec& u) { return norm(u - v) < 1e-12; }))
      distinct.push_back(v);
  const WeightedPoints hull = caratheodory(distinct, cert.alpha * good.x, good.oracle->dim);
  for (std::size_t c = 0; c < hull.index.size(); ++c) {
    cert.points.push_back(distinct[hull.index[c]]);
    cert.weights.push_back(hull.weight[c]);
  }
  return cert;
}

ReduceReport alexander_reduce(const GoodSet& good, const HullCertificate& cert, const Vec& x, double t) {
  if (norm(x - cert.x) > 1e-12) throw Error(ErrorCode::Certificate, "hull certificate is stale: x changed");
  if (!(t > 0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  const SubadditiveOracle& o = *good.oracle;
  const int d = o.dim;
  const Vec tx = t * x;
  for (int i = 0; i < d; ++i)
    if (std::abs(tx[i] - std::round(tx[i])) > 1e-9) throw Error(ErrorCode::InvalidArgument, "t x must be a lattice point");

  ReduceReport r;
  r.t = t;
  Vec whole{0, 0, 0};
  for (std::size_t c = 0; c < cert.points.size(); ++c) {
    const double coef = t * cert.weights[c] / cert.alpha;
    const long copies = static_cast<long>(std::floor(coef + 1e-9));
    for (long k = 0; k < copies; ++k) r.increments.push_back(cert.points[c]);
    whole = whole + static_cast<double>(copies) * cert.points[c];
    r.increment_gap += static_cast<double>(copies) * (o.f(cert.points[c]) - o.fbar_x(x, cert.points[c]));
  }
  r.z = tx - whole;
  for (int i = 0; i < d; ++i) r.z[i] = std::round(r.z[i]);
  Vec rtx{0, 0, 0};
  for (int i = 0; i < d; ++i) rtx[i] = std::round(tx[i]);
  r.lhs = o.f(rtx) - o.fbar(rtx);
  r.rhs = o.f(r.z) - o.fbar_x(x, r.z) + r.increment_gap;
  r.constant = r.increment_gap / t;
  r.z_norm = norm(r.z);
  r.z_bound = (d + 1) * good.K * norm(x);
  r.holds = r.lhs <= r.rhs + 1e-9 && r.z_norm <= r.z_bound + 1e-9;
  return r;
}

std::vector<Vec> greedy_unit_skeleton(const Vec& x, int dim) {
  double steps = 0;
  for (int i = 0; i < dim; ++i) steps = std::max(steps, std::abs(x[i]));
  const long n = static_cast<long>(std::ceil(steps - 1e-9));
  std::vector<Vec> out;
  for (long k = 0; k <= n; ++k) {
    Vec p{0, 0, 0};
    for (int i = 0; i < dim; ++i) p[i] = n ? std::round(x[i] * static_cast<double>(k) / static_cast<double>(n)) : 0;
    out.push_back(p);
  }
  if (n == 0) out.push_back(x);
  return out;
}

std::string GapReport::to_json() const {
  nlohmann::json j;
  j["oracle"] = oracle;
  j["nu"] = nu;
  j["M"] = M;
  j["bound_constant"] = bound_constant;
  for (const auto& l : levels)
    j["levels"].push_back({{"level", l.level},
                           {"radius", l.radius},
                           {"sup_gap", l.sup_gap},
                           {"sup_normalized", l.sup_normalized},
                           {"slack", l.slack},
                           {"slack_normalized", l.slack_normalized},
                           {"skeleton_constant", l.skeleton_constant}});
  return j.dump(2);
}

GapReport gap_from_skeleton(const SubadditiveOracle& oracle, double nu, const std::function<double(double)>& phi,
                            double M, double K, int levels, const SkeletonCallback& skeleton) {
  if (!(M > 1) || !(K > 0) || levels < 0) throw Error(ErrorCode::InvalidArgument, "gap_from_skeleton: need M > 1, K > 0");
  const int d = oracle.dim;
  const double top = K * std::pow(M, levels);
  GapReport rep;
  rep.oracle = oracle.name;
  rep.nu = nu;
  rep.M = M;

  // Lattice points up to the outer radius: all of them if affordable, else a
  // deterministic sample (axes included).
  std::vector<Vec> pts;
  const long R = static_cast<long>(std::ceil(top));
  const double count = std::pow(2.0 * R + 1, d);
  if (count <= 4e6) {
    for (long a = -R; a <= R; ++a)
      for (long b = -R; b <= R; ++b)
        for (long c = (d == 3 ? -R : 0); c <= (d == 3 ? R : 0); ++c) {
          const Vec p{double(a), double(b), double(c)};
          if (norm(p) <= top + 1e-9) pts.push_back(p);
        }
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-top, top);
    while (pts.size() < 2'000'000) {
      Vec p{std::round(u(rng)), std::round(u(rng)), d == 3 ? std::round(u(rng)) : 0.0};
      if (norm(p) <= top) pts.push_back(p);
    }
    for (long r = 1; r <= R; ++r)
      for (int i = 0; i < d; ++i) {
        Vec p{0, 0, 0};
        p[i] = double(r);
        if (norm(p) <= top) pts.push_back(p);
      }
  }

  double prev_gap = 0;
  for (int k = 0; k <= levels; ++k) {
    GapLevel lv;
    lv.level = k;
    lv.radius = K * std::pow(M, k);
    for (const Vec& p : pts) {
      const double r = norm(p);
      if (r > lv.radius + 1e-9) continue;
      const double gap = oracle.f(p) - oracle.fbar(p);
      lv.sup_gap = std::max(lv.sup_gap, gap);
      if (r >= 1) lv.sup_normalized = std::max(lv.sup_normalized, gap / (std::pow(r, nu) * phi(r)));
    }
    lv.slack = k == 0 ? lv.sup_gap : lv.sup_gap - prev_gap;
    const double base = k == 0 ? lv.radius : lv.radius / M;
    const double scale = (k == 0 ? 1.0 : std::pow(M, nu) - 1) * std::pow(base, nu) * phi(base);
    lv.slack_normalized = lv.slack / scale;
    prev_gap = lv.sup_gap;

    if (skeleton) {
      for (const Vec& u : control_directions(d, d == 2 ? 8 : 14)) {
        Vec y{0, 0, 0};
        for (int i = 0; i < d; ++i) y[i] = std::round(lv.radius * u[i]);
        if (norm(y) < 1) continue;
        const auto sk = skeleton(y);
        if (sk.size() < 2 || norm(sk.front()) > 1e-9 || norm(sk.back() - y) > 1e-9)
          throw Error(ErrorCode::Domain, "skeleton callback failed to produce a skeleton for x = (" +
                                             std::to_string(y[0]) + ", " + std::to_string(y[1]) + ", " +
                                             std::to_string(y[2]) + ")");
        double gap_sum = 0;
        for (std::size_t i = 1; i < sk.size(); ++i) {
          const Vec v = sk[i] - sk[i - 1];
          gap_sum += oracle.f(v) - oracle.fbar_x(y, v);
        }
        const double r = norm(y);
        lv.skeleton_constant = std::max(lv.skeleton_constant, gap_sum / (std::pow(r, nu) * phi(r)));
      }
    }
    rep.bound_constant = std::max(rep.bound_constant, lv.sup_normalized);
    rep.levels.push_back(lv);
  }
  return rep;
}

}  // namespace ghomog
