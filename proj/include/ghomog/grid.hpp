#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ghomog/common.hpp"

namespace ghomog {

class Field;

/// Uniform cell grid over an axis-aligned window. Cell i on an axis covers
/// [lo + i h, lo + (i+1) h); values live at cell centers.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, double h, const Vec& lo, const Vec& hi);

  int dim() const { return dim_; }
  double h() const { return h_; }
  const Vec& lo() const { return lo_; }
  Vec hi() const;
  const std::array<long, 3>& extent() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0] * n_[1] * n_[2]); }

  std::size_t index(const std::array<long, 3>& c) const {
    return static_cast<std::size_t>((c[0] * n_[1] + c[1]) * n_[2] + c[2]);
  }
  std::array<long, 3> coords(std::size_t idx) const;
  Vec center(std::size_t idx) const;
  Vec center(const std::array<long, 3>& c) const;
  std::optional<std::size_t> cell_of(const Vec& x) const;
  bool contains(const Vec& x) const { return cell_of(x).has_value(); }

  /// Distance from `x` to the window boundary (negative outside).
  double inner_margin(const Vec& x) const;

 private:
  int dim_ = 2;
  double h_ = 1;
  Vec lo_{};
  std::array<long, 3> n_{1, 1, 1};
};

/// Spatial/temporal discretization for reachable-set propagation.
struct GridConfig {
  double h = 0.25;        // cell spacing
  double dt = 0.05;       // time step
  Vec lo{-16, -16, 0};    // window
  Vec hi{16, 16, 0};
  int stencil = 0;        // edge radius in cells; 0 = 4 (d = 2) or 2 (d = 3)

  /// dt * speed / h where speed = 1 + sup|V| bounds the one-step displacement.
  double cfl_ratio(double speed) const { return dt * speed / h; }
  /// Throws Error(Config) naming the violated bound.
  void validate(const Field& field) const;
  Grid grid(int dim) const { return Grid(dim, h, lo, hi); }

  static GridConfig centered(int dim, double half_width, double h, double dt);
  /// Window of half-width >= half_width around `center` with `center` at a cell center.
  static GridConfig cell_centered(int dim, const Vec& center, double half_width, double h, double dt);
};

/// Primitive integer offsets with max-norm <= radius: the edge set of the solver.
std::vector<std::array<long, 3>> stencil_offsets(int dim, int radius);

/// Unit control directions: equally spaced angles (d = 2) or a Fibonacci sphere (d = 3).
std::vector<Vec> control_directions(int dim, int count);

/// Run-length coding of int32 grids. Layout (little endian):
///   "GHRL" | u32 version=1 | u32 dim | u32 n0,n1,n2 | f64 h | f64 lo0,lo1,lo2 | f64 scale
///   | u64 run count | runs of (u32 length, i32 value)
void write_rle(std::ostream& out, const Grid& grid, double scale, const std::vector<std::int32_t>& values);
std::vector<std::int32_t> read_rle(std::istream& in, Grid& grid, double& scale);

}  // namespace ghomog
