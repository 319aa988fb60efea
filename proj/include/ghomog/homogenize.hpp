#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ghomog/field.hpp"
#include "ghomog/reachability.hpp"

namespace ghomog {

/// Equal-angle grid (d = 2, starting at e1) or Fibonacci sphere (d = 3).
std::vector<Vec> direction_grid(int dim, int count);

/// Per-direction estimates of the limit shape theta_bar(v) = lim theta(0, R v)/R.
struct ShapeEstimate {
  int dim = 2;
  std::vector<Vec> directions;  // unit vectors
  std::vector<double> radii;    // increasing
  int trials = 0;
  std::vector<std::vector<double>> mean;  // [direction][radius] mean of theta(0, R v)
  std::vector<std::vector<double>> se;    // standard errors of `mean`
  std::vector<double> theta_bar;          // mean / R at the largest radius
  std::vector<double> theta_bar_se;
  /// mean/R non-increasing in R within two standard errors (plus grid error), per direction.
  std::vector<std::uint8_t> fekete_ok;

  /// Positively homogeneous extension: |v| times theta_bar interpolated in angle
  /// (d = 2) or by inverse-angle weights over the three nearest directions (d = 3).
  double theta_bar_at(const Vec& v) const;
  /// Isotropic estimate: every direction gets theta_bar = value.
  static ShapeEstimate constant(int dim, int directions, double value);
};

/// samples[trial][direction][radius] -> aggregated estimate. `grid_tol` is the
/// absolute error of one passage time attributable to the grid; the Fekete
/// diagnostic allows it on top of the statistical error.
ShapeEstimate aggregate_shape(int dim, const std::vector<Vec>& directions, const std::vector<double>& radii,
                              const std::vector<std::vector<std::vector<double>>>& samples, double grid_tol = 0);

/// theta(0, R v) for every direction and radius from one disk-shaped run.
std::vector<std::vector<double>> passage_samples(const Field& field, const std::vector<Vec>& directions,
                                                 const std::vector<double>& radii, double h, double dt);

struct EstimateOptions {
  int directions = 64;
  std::vector<double> radii{8, 16, 32};
  int trials = 8;
  std::uint64_t master_seed = 1;
  double h = 0.5;
  double dt = 0.1;
  int threads = 1;
};

ShapeEstimate estimate_theta_bar(const FieldSpec& spec, const EstimateOptions& opt);

/// S_t = {x : theta_bar(x) <= t} = t S_1, a star-shaped region (d = 2 only for
/// boundary queries).
class ShapeSet {
 public:
  ShapeSet(const ShapeEstimate& est, double t);
  double t() const { return t_; }
  /// Radius of S_t along the unit direction u.
  double radius(const Vec& u) const { return t_ / est_->theta_bar_at(u); }
  bool contains(const Vec& x) const;
  /// Dense boundary polygon: `refine` points per direction-grid interval.
  std::vector<Vec> boundary(int refine = 16) const;

 private:
  const ShapeEstimate* est_;
  double t_;
};

inline ShapeSet shape_set(const ShapeEstimate& est, double t) { return ShapeSet(est, t); }

/// sup over the direction grid of p.v / theta_bar(v).
double effective_H(const ShapeEstimate& est, const Vec& p);
/// sup over the dense boundary of S_1 of v.p (d = 2); the grid directions for d = 3.
double support_function(const ShapeEstimate& est, const Vec& p, int refine = 16);

/// Hausdorff distance between t^{-1} {cells with arrival <= t} and S_1 (d = 2).
double hausdorff_to_shape(const ArrivalGrid& arrivals, double t, const ShapeSet& s1);

using InitialData = std::function<double(const Vec&)>;

/// ubar(t, x) = sup over x + S_t of u0 (polar sampling of S_t).
double solve_u_bar(const ShapeEstimate& est, const InitialData& u0, double t, const Vec& x, int radial = 8,
                   int refine = 16);
/// u^eps(t, x) = sup over eps R_{t/eps}(x/eps) of u0, from one propagation run.
double solve_u_eps(const Field& field, double h, double dt, const InitialData& u0, double t, const Vec& x,
                   double eps);

/// max over cells reached by time s of p.c, for each s in `times`, from one run
/// on a strip window aligned with p (length (1+sup|V|) max(times) + margin,
/// half-width max(times)^(2/3) + 10).
std::vector<double> support_growth(const Field& field, const Vec& p, const std::vector<double>& times, double h,
                                   double dt);

/// theta(0, R v) for each R from one run on a strip window along v
/// (half-width (R_max |v|)^(2/3) + 10).
std::vector<double> passage_along(const Field& field, const Vec& v, const std::vector<double>& radii, double h,
                                  double dt);

struct SkeletonErrorReport {
  double error = 0;         // sum max(0, E theta(leg) - theta(leg))
  bool reasonable = true;   // eta-reasonable
  std::string violation;    // first violating pair, if any
  std::size_t legs = 0;
};

/// Error of a skeleton under one field plus the eta-reasonableness verdict
/// (legs bucketed by scale 2^k <= |leg| < 2^{k+1}).
SkeletonErrorReport skeleton_error(const Field& field, const std::vector<Vec>& skeleton,
                                   const std::function<double(const Vec&)>& expected_theta, double h, double dt,
                                   int eta);

bool eta_reasonable(const std::vector<Vec>& skeleton, double L, int eta, std::string* violation = nullptr);

}  // namespace ghomog
