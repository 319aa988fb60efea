#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "ghomog/field.hpp"
#include "ghomog/grid.hpp"

namespace ghomog {

enum class Direction { Forward, Backward };

constexpr std::int32_t kUnreached = std::numeric_limits<std::int32_t>::max();

/// Arrival time of every cell for one propagation run, shared by GridFront and
/// PassageMap. Times up to `horizon` are final; later cells read as +inf.
struct ArrivalGrid {
  Grid grid;
  Vec source{};
  double dt = 0;
  double rho = std::numeric_limits<double>::infinity();
  Direction direction = Direction::Forward;
  std::vector<double> time;  // +inf if not reached within the horizon
  double horizon = 0;
  bool touched_window = false;  // some edge would have left the window

  /// Step index of a cell: ceil(time / dt), or kUnreached.
  std::int32_t step(std::size_t cell) const;
  std::int32_t last_step() const;
};

/// Time-indexed reachable sets. mask(k) is the set of cells covered by step k.
///
/// Masks are the running union R^-_{k dt}; they coincide with R_{k dt} whenever
/// sup|V| < 1 (then every point can hold still), which `exact_reachable` records.
class GridFront {
 public:
  explicit GridFront(std::shared_ptr<const ArrivalGrid> data, bool exact_reachable);

  const Grid& grid() const { return data_->grid; }
  const Vec& origin() const { return data_->source; }
  double dt() const { return data_->dt; }
  std::int32_t steps() const { return data_->last_step(); }
  bool exact_reachable() const { return exact_; }

  std::vector<std::uint8_t> mask(std::int32_t k) const;
  std::size_t cell_count(std::int32_t k) const;
  /// Cell centers of mask(k).
  std::vector<Vec> points(std::int32_t k) const;

  void write_csv(std::ostream& out, std::int32_t k) const;
  void write_rle(std::ostream& out, std::int32_t k) const;

  const ArrivalGrid& arrivals() const { return *data_; }

 private:
  std::shared_ptr<const ArrivalGrid> data_;
  bool exact_;
};

/// First-passage times theta(x0, .) on a grid, +inf where unreached.
class PassageMap {
 public:
  explicit PassageMap(std::shared_ptr<const ArrivalGrid> data) : data_(std::move(data)) {}

  const Grid& grid() const { return data_->grid; }
  const Vec& source() const { return data_->source; }
  double rho() const { return data_->rho; }
  double dt() const { return data_->dt; }

  double time(std::size_t cell) const;
  /// theta of the cell containing y; throws Error(Window) if y is outside the grid.
  double at(const Vec& y) const;

  void write_csv(std::ostream& out) const;
  void write_rle(std::ostream& out) const;

  const ArrivalGrid& arrivals() const { return *data_; }

 private:
  std::shared_ptr<const ArrivalGrid> data_;
};

struct PropagateOptions {
  double t_max = std::numeric_limits<double>::infinity();
  double rho = std::numeric_limits<double>::infinity();
  Direction direction = Direction::Forward;
  /// Stop once every target cell has a final arrival time.
  std::vector<Vec> targets;
  /// Require the window to contain ball(x0, (1+sup|V|) t_max + 1).
  bool check_window = true;
};

/// Core engine: Dijkstra over cell centers with a long-range stencil.
///
/// An edge c -> c + e is the straight segment traversed as fast as the controls
/// allow: at a point with drift V the top speed along the unit direction u is
///   s(u, V) = u.V + sqrt((u.V)^2 - |V|^2 + 1),
/// so the edge costs the integral of 1/s along the segment (midpoint rule, V
/// interpolated from a half-spacing sample lattice). Every edge is a genuine
/// controlled path, hence arrival times never beat the speed limit 1 + sup|V|.
/// The source cell starts at time 0.
/// With finite rho, a cell reached at time tau also covers, at tau + rho, every
/// cell whose center lies within distance 1 of its center.
std::shared_ptr<ArrivalGrid> solve_arrivals(const Field& field, const Vec& x0, const GridConfig& cfg,
                                            const PropagateOptions& opts);

GridFront propagate(const Field& field, const Vec& x0, double t_max, const GridConfig& cfg,
                    Direction direction = Direction::Forward);

PassageMap first_passage(const Field& field, const Vec& x0, const GridConfig& cfg,
                         double rho = std::numeric_limits<double>::infinity(),
                         double t_max = std::numeric_limits<double>::infinity());

/// Required window half-width around x0 for a run of duration t_max.
double required_radius(const Field& field, double t_max);

/// {z in d^{-1/2} Z^d : |z - c| <= 1 for some c in points}, sorted lexicographically.
std::vector<Vec> disc(const std::vector<Vec>& points, int dim);

struct OracleConfig {
  double h = 0.01;
  double dt = 0.2;
  double half_width = 8;  // window [-w, w]^d around `center`
  Vec center{0, 0, 0};
  int directions = 64;
  std::size_t max_nodes = 20'000'000;
  double t_max = 50;
};

/// Independent cross-check: breadth-first search on a fine cell graph whose edges
/// are single Euler steps c -> c + dt (a + V(c)) from cell centers, over a finite
/// set of controls a. Returns the arrival time (levels * dt) of each target.
std::vector<double> oracle_passage(const Field& field, const Vec& x0, const std::vector<Vec>& targets,
                                   const OracleConfig& cfg);

}  // namespace ghomog
