#include "ghomog/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <set>

#include "ghomog/config.hpp"

namespace ghomog {

namespace {

bool in_extent(const std::array<long, 3>& c, const std::array<long, 3>& n) {
  return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < n[0] && c[1] < n[1] && c[2] < n[2];
}

void write_center(std::ostream& out, const Vec& x, int d) {
  for (int i = 0; i < d; ++i) out << format_double(x[i]) << ',';
}

// Drift sampled lazily on the lattice lo + j h/2, interpolated multilinearly.
class DriftSampler {
 public:
  DriftSampler(const Field& field, const Grid& grid, double sign)
      : field_(field), d_(grid.dim()), step_(grid.h() / 2), lo_(grid.lo()), sign_(sign) {
    for (int i = 0; i < 3; ++i) n_[i] = i < d_ ? 2 * grid.extent()[i] + 1 : 1;
    values_.assign(static_cast<std::size_t>(n_[0] * n_[1] * n_[2]), Vec{NAN, 0, 0});
  }

  Vec operator()(const Vec& x) {
    long base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) {
      const double f = (x[i] - lo_[i]) / step_;
      base[i] = std::clamp(static_cast<long>(std::floor(f)), 0L, n_[i] - 2);
      frac[i] = std::clamp(f - static_cast<double>(base[i]), 0.0, 1.0);
    }
    Vec out{0, 0, 0};
    const int corners = d_ == 3 ? 8 : 4;
    for (int c = 0; c < corners; ++c) {
      double w = 1;
      long idx[3] = {0, 0, 0};
      for (int i = 0; i < d_; ++i) {
        const int bit = (c >> i) & 1;
        idx[i] = base[i] + bit;
        w *= bit ? frac[i] : 1 - frac[i];
      }
      if (w == 0) continue;
      out = out + w * sample(idx);
    }
    return out;
  }

 private:
  const Vec& sample(const long* idx) {
    Vec& v = values_[static_cast<std::size_t>((idx[0] * n_[1] + idx[1]) * n_[2] + idx[2])];
    if (std::isnan(v[0])) {
      Vec x{0, 0, 0};
      for (int i = 0; i < d_; ++i) x[i] = lo_[i] + static_cast<double>(idx[i]) * step_;
      v = sign_ * field_.eval(x);
    }
    return v;
  }

  const Field& field_;
  int d_;
  double step_;
  Vec lo_;
  double sign_;
  long n_[3];
  std::vector<Vec> values_;
};

// Top speed along unit direction u under drift v; <= 0 means the direction is blocked.
double top_speed(const Vec& u, const Vec& v) {
  const double uv = dot(u, v);
  const double disc = uv * uv - dot(v, v) + 1.0;
  if (disc < 0) return 0;
  return uv + std::sqrt(disc);
}

}  // namespace

std::int32_t ArrivalGrid::step(std::size_t cell) const {
  const double t = time[cell];
  if (!std::isfinite(t)) return kUnreached;
  return static_cast<std::int32_t>(std::ceil(t / dt - 1e-9));
}

std::int32_t ArrivalGrid::last_step() const {
  if (std::isfinite(horizon)) return static_cast<std::int32_t>(std::floor(horizon / dt + 1e-9));
  std::int32_t k = 0;
  for (std::size_t i = 0; i < time.size(); ++i)
    if (std::isfinite(time[i])) k = std::max(k, step(i));
  return k;
}

double required_radius(const Field& field, double t_max) { return field.max_speed() * t_max + 1.0; }

std::shared_ptr<ArrivalGrid> solve_arrivals(const Field& field, const Vec& x0, const GridConfig& cfg,
                                            const PropagateOptions& opts) {
  cfg.validate(field);
  const int d = field.dim();
  auto out = std::make_shared<ArrivalGrid>();
  out->grid = cfg.grid(d);
  out->source = x0;
  out->dt = cfg.dt;
  out->rho = opts.rho;
  out->direction = opts.direction;
  const Grid& grid = out->grid;

  const auto src = grid.cell_of(x0);
  if (!src) throw Error(ErrorCode::Window, "source point lies outside the grid window");
  if (std::isfinite(opts.t_max) && opts.check_window) {
    const double need = required_radius(field, opts.t_max);
    const double have = grid.inner_margin(x0);
    if (have < need)
      throw Error(ErrorCode::Window, "window too small: need radius " + format_double(need) +
                                         " around the source, have " + format_double(have));
  }
  if (!(opts.rho > 0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive (or infinite)");

  std::vector<std::size_t> target_cells;
  for (const Vec& t : opts.targets) {
    auto c = grid.cell_of(t);
    if (!c) throw Error(ErrorCode::Window, "target point lies outside the grid window");
    target_cells.push_back(*c);
  }

  const double h = grid.h();
  const int radius = cfg.stencil > 0 ? cfg.stencil : (d == 2 ? 4 : 2);
  struct Edge {
    std::array<long, 3> off;
    std::vector<Vec> fractions;  // sample offsets along the segment
    Vec unit;
    double piece;  // segment length / sample count
  };
  std::vector<Edge> edges;
  for (const auto& off : stencil_offsets(d, radius)) {
    Edge e;
    e.off = off;
    const Vec disp{off[0] * h, off[1] * h, off[2] * h};
    const double len = norm(disp);
    const int m = std::max(1, static_cast<int>(std::ceil(len / (h / 2) - 1e-9)));
    e.unit = (1.0 / len) * disp;
    e.piece = len / m;
    for (int j = 0; j < m; ++j) e.fractions.push_back(((j + 0.5) / m) * disp);
    edges.push_back(std::move(e));
  }

  std::vector<std::array<long, 3>> ball;
  if (std::isfinite(opts.rho)) {
    const long span = static_cast<long>(std::floor(1.0 / h + 1e-9));
    const long zspan = d == 3 ? span : 0;
    for (long a = -span; a <= span; ++a)
      for (long b = -span; b <= span; ++b)
        for (long c = -zspan; c <= zspan; ++c)
          if ((a || b || c) && std::sqrt(double(a * a + b * b + c * c)) * h <= 1.0 + 1e-12) ball.push_back({a, b, c});
  }

  DriftSampler drift(field, grid, opts.direction == Direction::Forward ? 1.0 : -1.0);
  auto& time = out->time;
  time.assign(grid.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> done(grid.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  time[*src] = 0;
  heap.push({0.0, *src});

  const auto& ext = grid.extent();
  std::size_t targets_left = target_cells.size();
  std::vector<std::uint8_t> is_target(target_cells.empty() ? 0 : grid.size(), 0);
  for (std::size_t c : target_cells) {
    if (!is_target[c]) is_target[c] = 1;
    else --targets_left;
  }
  double horizon = std::isfinite(opts.t_max) ? opts.t_max : std::numeric_limits<double>::infinity();

  auto relax = [&](std::size_t cell, double t) {
    if (t < time[cell]) {
      time[cell] = t;
      heap.push({t, cell});
    }
  };

  while (!heap.empty()) {
    const auto [t, cell] = heap.top();
    heap.pop();
    if (done[cell] || t != time[cell]) continue;
    if (t > opts.t_max) break;
    done[cell] = 1;
    if (!target_cells.empty() && is_target[cell] && --targets_left == 0) {
      horizon = t;
      break;
    }
    const auto base = grid.coords(cell);
    const Vec x = grid.center(base);
    for (const Edge& e : edges) {
      const std::array<long, 3> z{base[0] + e.off[0], base[1] + e.off[1], base[2] + e.off[2]};
      if (!in_extent(z, ext)) {
        out->touched_window = true;
        continue;
      }
      const std::size_t zi = grid.index(z);
      if (done[zi]) continue;
      double cost = 0;
      for (const Vec& f : e.fractions) {
        const double s = top_speed(e.unit, drift(x + f));
        if (s <= 1e-12) {
          cost = std::numeric_limits<double>::infinity();
          break;
        }
        cost += e.piece / s;
      }
      relax(zi, t + cost);
    }
    if (!ball.empty()) {
      for (const auto& off : ball) {
        const std::array<long, 3> z{base[0] + off[0], base[1] + off[1], base[2] + off[2]};
        if (in_extent(z, ext)) relax(grid.index(z), t + opts.rho);
      }
    }
  }
  out->horizon = horizon;
  for (std::size_t i = 0; i < time.size(); ++i)
    if (!done[i]) time[i] = std::numeric_limits<double>::infinity();
  return out;
}

GridFront::GridFront(std::shared_ptr<const ArrivalGrid> data, bool exact_reachable)
    : data_(std::move(data)), exact_(exact_reachable) {}

namespace {
bool covered(const ArrivalGrid& a, std::size_t i, std::int32_t k) { return a.time[i] <= k * a.dt + 1e-9; }
}  // namespace

std::vector<std::uint8_t> GridFront::mask(std::int32_t k) const {
  std::vector<std::uint8_t> m(data_->time.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = covered(*data_, i, k) ? 1 : 0;
  return m;
}

std::size_t GridFront::cell_count(std::int32_t k) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < data_->time.size(); ++i) n += covered(*data_, i, k) ? 1 : 0;
  return n;
}

std::vector<Vec> GridFront::points(std::int32_t k) const {
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < data_->time.size(); ++i)
    if (covered(*data_, i, k)) pts.push_back(data_->grid.center(i));
  return pts;
}

void GridFront::write_csv(std::ostream& out, std::int32_t k) const {
  const int d = data_->grid.dim();
  out << (d == 2 ? "x,y,value\n" : "x,y,z,value\n");
  for (std::size_t i = 0; i < data_->time.size(); ++i)
    if (covered(*data_, i, k)) {
      write_center(out, data_->grid.center(i), d);
      out << "1\n";
    }
}

void GridFront::write_rle(std::ostream& out, std::int32_t k) const {
  std::vector<std::int32_t> values(data_->time.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = covered(*data_, i, k) ? 1 : 0;
  ghomog::write_rle(out, data_->grid, 1.0, values);
}

double PassageMap::time(std::size_t cell) const { return data_->time.at(cell); }

double PassageMap::at(const Vec& y) const {
  auto c = data_->grid.cell_of(y);
  if (!c) throw Error(ErrorCode::Window, "query point lies outside the passage map");
  return time(*c);
}

void PassageMap::write_csv(std::ostream& out) const {
  const int d = data_->grid.dim();
  out << (d == 2 ? "x,y,value\n" : "x,y,z,value\n");
  for (std::size_t i = 0; i < data_->time.size(); ++i) {
    write_center(out, data_->grid.center(i), d);
    out << format_double(time(i)) << '\n';
  }
}

// Stored as step indices (scale dt); unreached cells as -1.
void PassageMap::write_rle(std::ostream& out) const {
  std::vector<std::int32_t> values(data_->time.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::int32_t s = data_->step(i);
    values[i] = s == kUnreached ? -1 : s;
  }
  ghomog::write_rle(out, data_->grid, data_->dt, values);
}

GridFront propagate(const Field& field, const Vec& x0, double t_max, const GridConfig& cfg, Direction direction) {
  if (!(t_max >= 0) || !std::isfinite(t_max)) throw Error(ErrorCode::InvalidArgument, "t_max must be finite and >= 0");
  PropagateOptions opts;
  opts.t_max = t_max;
  opts.direction = direction;
  return GridFront(solve_arrivals(field, x0, cfg, opts), field.bounds().speed < 1.0);
}

PassageMap first_passage(const Field& field, const Vec& x0, const GridConfig& cfg, double rho, double t_max) {
  PropagateOptions opts;
  opts.t_max = t_max;
  opts.rho = rho;
  return PassageMap(solve_arrivals(field, x0, cfg, opts));
}

std::vector<Vec> disc(const std::vector<Vec>& points, int dim) {
  const double delta = 1.0 / std::sqrt(static_cast<double>(dim));
  std::set<std::array<long, 3>> found;
  for (const Vec& p : points) {
    long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      lo[i] = static_cast<long>(std::ceil((p[i] - 1.0) / delta - 1e-12));
      hi[i] = static_cast<long>(std::floor((p[i] + 1.0) / delta + 1e-12));
    }
    for (long a = lo[0]; a <= hi[0]; ++a)
      for (long b = lo[1]; b <= hi[1]; ++b)
        for (long c = lo[2]; c <= hi[2]; ++c) {
          const Vec z{a * delta, b * delta, dim == 3 ? c * delta : 0.0};
          if (norm(z - p) <= 1.0 + 1e-12) found.insert({a, b, c});
        }
  }
  std::vector<Vec> out;
  out.reserve(found.size());
  for (const auto& m : found) out.push_back({m[0] * delta, m[1] * delta, dim == 3 ? m[2] * delta : 0.0});
  return out;
}

}  // namespace ghomog
