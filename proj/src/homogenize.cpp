#include "ghomog/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "ghomog/stats.hpp"

namespace ghomog {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double angle_of(const Vec& u) {
  double a = std::atan2(u[1], u[0]);
  if (a < 0) a += kTwoPi;
  return a;
}

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * ab));
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

GridConfig strip_window(int d, const Vec& u, double back, double ahead, double half, double h, double dt) {
  // Bounding box of {-back <= x.u <= ahead, |x - (x.u)u| <= half}, origin at a cell center.
  GridConfig cfg;
  cfg.h = h;
  cfg.dt = dt;
  for (int i = 0; i < 3; ++i) {
    if (i >= d) {
      cfg.lo[i] = cfg.hi[i] = 0;
      continue;
    }
    const double perp = half * std::sqrt(std::max(0.0, 1 - u[i] * u[i]));
    const double lo = std::min(-back * u[i], ahead * u[i]) - perp;
    const double hi = std::max(-back * u[i], ahead * u[i]) + perp;
    cfg.lo[i] = -(std::ceil(-lo / h) + 0.5) * h;
    cfg.hi[i] = (std::ceil(hi / h) + 0.5) * h;
  }
  return cfg;
}

}  // namespace

std::vector<Vec> direction_grid(int dim, int count) {
  if (count < 3) throw Error(ErrorCode::InvalidArgument, "direction grid needs >= 3 directions");
  return control_directions(dim, count);
}

double ShapeEstimate::theta_bar_at(const Vec& v) const {
  const double r = norm(v);
  if (r == 0) return 0;
  const Vec u = (1.0 / r) * v;
  const std::size_t K = directions.size();
  if (dim == 2) {
    const double step = kTwoPi / static_cast<double>(K);
    const double a = angle_of(u) / step;
    const auto k = static_cast<std::size_t>(std::floor(a)) % K;
    const double frac = a - std::floor(a);
    return r * ((1 - frac) * theta_bar[k] + frac * theta_bar[(k + 1) % K]);
  }
  // Three nearest directions, inverse-angle weights.
  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t k = 0; k < K; ++k) near.push_back({std::acos(std::clamp(dot(u, directions[k]), -1.0, 1.0)), k});
  std::partial_sort(near.begin(), near.begin() + 3, near.end());
  if (near[0].first < 1e-12) return r * theta_bar[near[0].second];
  double wsum = 0, acc = 0;
  for (int i = 0; i < 3; ++i) {
    const double w = 1 / near[static_cast<std::size_t>(i)].first;
    wsum += w;
    acc += w * theta_bar[near[static_cast<std::size_t>(i)].second];
  }
  return r * acc / wsum;
}

ShapeEstimate ShapeEstimate::constant(int dim, int directions, double value) {
  ShapeEstimate e;
  e.dim = dim;
  e.directions = direction_grid(dim, directions);
  e.radii = {1};
  e.trials = 1;
  e.mean.assign(e.directions.size(), {value});
  e.se.assign(e.directions.size(), {0});
  e.theta_bar.assign(e.directions.size(), value);
  e.theta_bar_se.assign(e.directions.size(), 0);
  e.fekete_ok.assign(e.directions.size(), 1);
  return e;
}

ShapeEstimate aggregate_shape(int dim, const std::vector<Vec>& directions, const std::vector<double>& radii,
                              const std::vector<std::vector<std::vector<double>>>& samples, double grid_tol) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "shape estimate needs at least one trial");
  if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()))
    throw Error(ErrorCode::InvalidArgument, "radii must be non-empty and increasing");
  ShapeEstimate e;
  e.dim = dim;
  e.directions = directions;
  e.radii = radii;
  e.trials = static_cast<int>(samples.size());
  const std::size_t K = directions.size(), nr = radii.size();
  e.mean.assign(K, std::vector<double>(nr));
  e.se.assign(K, std::vector<double>(nr));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < nr; ++j) {
      std::vector<double> col;
      for (const auto& trial : samples) {
        const double v = trial.at(k).at(j);
        if (!std::isfinite(v)) throw Error(ErrorCode::Window, "unreached target in a shape trial");
        col.push_back(v);
      }
      e.mean[k][j] = mean(col);
      e.se[k][j] = col.size() > 1 ? std_error(col) : 0.0;
    }
  for (std::size_t k = 0; k < K; ++k) {
    e.theta_bar.push_back(e.mean[k][nr - 1] / radii[nr - 1]);
    e.theta_bar_se.push_back(e.se[k][nr - 1] / radii[nr - 1]);
    bool ok = true;
    for (std::size_t j = 1; j < nr; ++j) {
      const double a = e.mean[k][j - 1] / radii[j - 1], b = e.mean[k][j] / radii[j];
      const double tol = 2 * std::hypot(e.se[k][j - 1] / radii[j - 1], e.se[k][j] / radii[j]) +
                         grid_tol / radii[j - 1] + grid_tol / radii[j];
      if (b > a + tol + 1e-12) ok = false;
    }
    e.fekete_ok.push_back(ok ? 1 : 0);
  }
  return e;
}

std::vector<std::vector<double>> passage_samples(const Field& field, const std::vector<Vec>& directions,
                                                 const std::vector<double>& radii, double h, double dt) {
  const int d = field.dim();
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const GridConfig cfg = GridConfig::cell_centered(d, {0, 0, 0}, rmax + 3, h, dt);
  PropagateOptions opts;
  opts.check_window = false;
  for (const Vec& u : directions)
    for (double R : radii) opts.targets.push_back(R * u);
  const auto arr = solve_arrivals(field, {0, 0, 0}, cfg, opts);
  std::vector<std::vector<double>> out(directions.size(), std::vector<double>(radii.size()));
  for (std::size_t k = 0; k < directions.size(); ++k)
    for (std::size_t j = 0; j < radii.size(); ++j)
      out[k][j] = arr->time[*arr->grid.cell_of(radii[j] * directions[k])];
  return out;
}

ShapeEstimate estimate_theta_bar(const FieldSpec& spec, const EstimateOptions& opt) {
  spec.validate();
  if (opt.trials < 2) throw Error(ErrorCode::InvalidArgument, "theta_bar estimate needs >= 2 trials");
  const auto dirs = direction_grid(spec.dim, opt.directions);
  std::vector<std::vector<std::vector<double>>> samples(static_cast<std::size_t>(opt.trials));
  parallel_for(opt.trials, opt.threads, [&](int i) {
    const Field field(spec, derive_seed(opt.master_seed, static_cast<std::uint64_t>(i)));
    samples[static_cast<std::size_t>(i)] = passage_samples(field, dirs, opt.radii, opt.h, opt.dt);
  });
  return aggregate_shape(spec.dim, dirs, opt.radii, samples, opt.h);
}

ShapeSet::ShapeSet(const ShapeEstimate& est, double t) : est_(&est), t_(t) {
  if (!(t >= 0)) throw Error(ErrorCode::InvalidArgument, "shape set needs t >= 0");
  if (est.theta_bar.empty()) throw Error(ErrorCode::InvalidArgument, "empty shape estimate");
}

bool ShapeSet::contains(const Vec& x) const { return est_->theta_bar_at(x) <= t_ + 1e-12; }

std::vector<Vec> ShapeSet::boundary(int refine) const {
  if (est_->dim != 2) throw Error(ErrorCode::Domain, "shape boundary sampling is implemented for d = 2");
  const std::size_t n = est_->directions.size() * static_cast<std::size_t>(std::max(1, refine));
  std::vector<Vec> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    const Vec u{std::cos(a), std::sin(a), 0};
    pts.push_back(radius(u) * u);
  }
  return pts;
}

double effective_H(const ShapeEstimate& est, const Vec& p) {
  double best = -INFINITY;
  for (std::size_t k = 0; k < est.directions.size(); ++k)
    best = std::max(best, dot(p, est.directions[k]) / est.theta_bar[k]);
  return best;
}

double support_function(const ShapeEstimate& est, const Vec& p, int refine) {
  if (est.dim != 2) return effective_H(est, p);
  double best = -INFINITY;
  for (const Vec& b : ShapeSet(est, 1).boundary(refine)) best = std::max(best, dot(b, p));
  return best;
}

double hausdorff_to_shape(const ArrivalGrid& arr, double t, const ShapeSet& s1) {
  const Grid& g = arr.grid;
  if (g.dim() != 2) throw Error(ErrorCode::Domain, "Hausdorff distance to the shape is implemented for d = 2");
  if (!(t > 0)) throw Error(ErrorCode::InvalidArgument, "Hausdorff distance needs t > 0");
  const auto& n = g.extent();
  auto covered = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= n[0] || j >= n[1]) return false;
    return arr.time[g.index({i, j, 0})] <= t;
  };
  std::vector<Vec> edge;  // scaled centers of boundary cells of the reached set
  for (long i = 0; i < n[0]; ++i)
    for (long j = 0; j < n[1]; ++j) {
      if (!covered(i, j)) continue;
      if (covered(i - 1, j) && covered(i + 1, j) && covered(i, j - 1) && covered(i, j + 1)) continue;
      edge.push_back((1.0 / t) * g.center(std::array<long, 3>{i, j, 0}));
    }
  if (edge.empty()) throw Error(ErrorCode::Domain, "reached set is empty");
  const std::vector<Vec> poly = s1.boundary();

  double worst = 0;
  for (const Vec& a : edge) {
    if (s1.contains(a)) continue;
    double dmin = INFINITY;
    for (std::size_t k = 0; k < poly.size(); ++k)
      dmin = std::min(dmin, segment_distance(a, poly[k], poly[(k + 1) % poly.size()]));
    worst = std::max(worst, dmin);
  }
  for (const Vec& b : poly) {
    const auto c = g.cell_of(t * b);
    if (c && arr.time[*c] <= t) continue;
    double dmin = INFINITY;
    for (const Vec& a : edge) dmin = std::min(dmin, norm(a - b));
    worst = std::max(worst, dmin);
  }
  return worst;
}

double solve_u_bar(const ShapeEstimate& est, const InitialData& u0, double t, const Vec& x, int radial, int refine) {
  if (!(t >= 0)) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  double best = u0(x);
  if (t == 0) return best;
  const ShapeSet st(est, t);
  std::vector<Vec> rim;
  if (est.dim == 2) {
    rim = st.boundary(refine);
  } else {
    for (const Vec& u : est.directions) rim.push_back(st.radius(u) * u);
  }
  for (const Vec& b : rim)
    for (int j = 1; j <= radial; ++j) best = std::max(best, u0(x + (static_cast<double>(j) / radial) * b));
  return best;
}

double solve_u_eps(const Field& field, double h, double dt, const InitialData& u0, double t, const Vec& x,
                   double eps) {
  if (!(eps > 0) || !(t >= 0)) throw Error(ErrorCode::InvalidArgument, "need eps > 0 and t >= 0");
  const int d = field.dim();
  const double s = t / eps;
  const Vec src = (1.0 / eps) * x;
  const GridConfig cfg = GridConfig::cell_centered(d, src, required_radius(field, s) + h, h, dt);
  PropagateOptions opts;
  opts.t_max = s;
  const auto arr = solve_arrivals(field, src, cfg, opts);
  double best = u0(x);
  for (std::size_t i = 0; i < arr->time.size(); ++i)
    if (arr->time[i] <= s) best = std::max(best, u0(eps * arr->grid.center(i)));
  return best;
}

std::vector<double> support_growth(const Field& field, const Vec& p, const std::vector<double>& times, double h,
                                   double dt) {
  const int d = field.dim();
  if (times.empty()) return {};
  const double pn = norm(p);
  if (!(pn > 0)) throw Error(ErrorCode::InvalidArgument, "support growth needs p != 0");
  const Vec u = (1.0 / pn) * p;
  const double smax = *std::max_element(times.begin(), times.end());
  const double ahead = field.max_speed() * smax + 2;
  const double half = std::pow(smax, 2.0 / 3.0) + 10;
  const double back = std::min(ahead, half);
  const GridConfig cfg = strip_window(d, u, back, ahead, half, h, dt);
  PropagateOptions opts;
  opts.t_max = smax;
  opts.check_window = false;
  const auto arr = solve_arrivals(field, {0, 0, 0}, cfg, opts);

  std::vector<std::size_t> order(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> sorted;
  for (std::size_t k : order) sorted.push_back(times[k]);
  std::vector<double> best(times.size(), -INFINITY);
  for (std::size_t i = 0; i < arr->time.size(); ++i) {
    const double tc = arr->time[i];
    if (!(tc <= smax)) continue;
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), tc - 1e-12);
    if (it == sorted.end()) continue;
    const auto k = static_cast<std::size_t>(it - sorted.begin());
    best[k] = std::max(best[k], dot(p, arr->grid.center(i)));
  }
  for (std::size_t k = 1; k < best.size(); ++k) best[k] = std::max(best[k], best[k - 1]);
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = best[k];
  return out;
}

std::vector<double> passage_along(const Field& field, const Vec& v, const std::vector<double>& radii, double h,
                                  double dt) {
  const int d = field.dim();
  if (radii.empty()) return {};
  const double vn = norm(v);
  if (!(vn > 0)) throw Error(ErrorCode::InvalidArgument, "passage_along needs v != 0");
  const Vec u = (1.0 / vn) * v;
  const double rmax = *std::max_element(radii.begin(), radii.end()) * vn;
  const GridConfig cfg = strip_window(d, u, 10, rmax + 10, std::pow(rmax, 2.0 / 3.0) + 10, h, dt);
  PropagateOptions opts;
  opts.check_window = false;
  for (double R : radii) opts.targets.push_back(R * v);
  const auto arr = solve_arrivals(field, {0, 0, 0}, cfg, opts);
  std::vector<double> out;
  for (double R : radii) out.push_back(arr->time[*arr->grid.cell_of(R * v)]);
  return out;
}

bool eta_reasonable(const std::vector<Vec>& skeleton, double L, int eta, std::string* violation) {
  std::map<long, std::vector<std::size_t>> buckets;
  for (std::size_t k = 1; k < skeleton.size(); ++k) {
    const double len = norm(skeleton[k] - skeleton[k - 1]);
    if (len > 0) buckets[static_cast<long>(std::floor(std::log2(len)))].push_back(k);
  }
  for (const auto& [scale, legs] : buckets)
    for (std::size_t a = 0; a < legs.size(); ++a)
      for (std::size_t b = a + static_cast<std::size_t>(std::max(1, eta)); b < legs.size(); ++b) {
        const std::size_t i = legs[a], j = legs[b];
        const double li = norm(skeleton[i] - skeleton[i - 1]), lj = norm(skeleton[j] - skeleton[j - 1]);
        if ((L + 1) * (li + lj) + 1 > norm(skeleton[i] - skeleton[j]) + 1e-12) {
          if (violation)
            *violation = "legs " + std::to_string(i) + " and " + std::to_string(j) + " at scale 2^" +
                         std::to_string(scale) + " are too close";
          return false;
        }
      }
  return true;
}

SkeletonErrorReport skeleton_error(const Field& field, const std::vector<Vec>& skeleton,
                                   const std::function<double(const Vec&)>& expected_theta, double h, double dt,
                                   int eta) {
  if (skeleton.size() < 2) throw Error(ErrorCode::InvalidArgument, "skeleton needs >= 2 points");
  SkeletonErrorReport rep;
  rep.legs = skeleton.size() - 1;
  for (std::size_t k = 1; k < skeleton.size(); ++k) {
    const Vec a = skeleton[k - 1], b = skeleton[k];
    const double expect = expected_theta(b - a);
    if (!std::isfinite(expect))
      throw Error(ErrorCode::Domain, "expected passage time unavailable for leg " + std::to_string(k));
    const GridConfig cfg = GridConfig::cell_centered(field.dim(), a, norm(b - a) + 4, h, dt);
    PropagateOptions opts;
    opts.check_window = false;
    opts.targets = {b};
    const auto arr = solve_arrivals(field, a, cfg, opts);
    const double theta = arr->time[*arr->grid.cell_of(b)];
    rep.error += std::max(0.0, expect - theta);
  }
  rep.reasonable = eta_reasonable(skeleton, field.max_speed() - 1, eta, &rep.violation);
  return rep;
}

}  // namespace ghomog
