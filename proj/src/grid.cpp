#include "ghomog/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>

#include "ghomog/config.hpp"
#include "ghomog/field.hpp"

namespace ghomog {

Grid::Grid(int dim, double h, const Vec& lo, const Vec& hi) : dim_(dim), h_(h), lo_(lo) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "grid dimension must be 2 or 3");
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  for (int i = 0; i < 3; ++i) {
    if (i >= dim) {
      lo_[i] = 0;
      n_[i] = 1;
      continue;
    }
    if (!(hi[i] > lo[i])) throw Error(ErrorCode::InvalidArgument, "grid window must have hi > lo on every axis");
    n_[i] = static_cast<long>(std::ceil((hi[i] - lo[i]) / h - 1e-9));
  }
}

Vec Grid::hi() const {
  Vec out = lo_;
  for (int i = 0; i < dim_; ++i) out[i] += n_[i] * h_;
  return out;
}

std::array<long, 3> Grid::coords(std::size_t idx) const {
  std::array<long, 3> c{};
  c[2] = static_cast<long>(idx % static_cast<std::size_t>(n_[2]));
  idx /= static_cast<std::size_t>(n_[2]);
  c[1] = static_cast<long>(idx % static_cast<std::size_t>(n_[1]));
  c[0] = static_cast<long>(idx / static_cast<std::size_t>(n_[1]));
  return c;
}

Vec Grid::center(const std::array<long, 3>& c) const {
  Vec x{0, 0, 0};
  for (int i = 0; i < dim_; ++i) x[i] = lo_[i] + (static_cast<double>(c[i]) + 0.5) * h_;
  return x;
}

Vec Grid::center(std::size_t idx) const { return center(coords(idx)); }

std::optional<std::size_t> Grid::cell_of(const Vec& x) const {
  std::array<long, 3> c{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    const double f = std::floor((x[i] - lo_[i]) / h_);
    if (!(f >= 0 && f < static_cast<double>(n_[i]))) return std::nullopt;
    c[i] = static_cast<long>(f);
  }
  return index(c);
}

double Grid::inner_margin(const Vec& x) const {
  double m = INFINITY;
  const Vec top = hi();
  for (int i = 0; i < dim_; ++i) m = std::min({m, x[i] - lo_[i], top[i] - x[i]});
  return m;
}

void GridConfig::validate(const Field& field) const {
  if (!(h > 0)) throw Error(ErrorCode::Config, "grid.spacing must be > 0");
  if (!(dt > 0)) throw Error(ErrorCode::Config, "grid.time_step must be > 0");
  if (stencil < 0 || stencil > 8) throw Error(ErrorCode::Config, "grid.stencil must be in 0..8");
  for (int i = 0; i < field.dim(); ++i)
    if (!(hi[i] > lo[i])) throw Error(ErrorCode::Config, "grid window must have hi > lo on every axis");
  const double ratio = cfl_ratio(field.max_speed());
  if (ratio > 0.5 + 1e-12)
    throw Error(ErrorCode::Config, "grid: CFL ratio dt*(1+sup|V|)/h = " + format_double(ratio) +
                                       " exceeds 1/2; need time_step <= " +
                                       format_double(0.5 * h / field.max_speed()));
}

GridConfig GridConfig::centered(int dim, double half_width, double h, double dt) {
  GridConfig cfg;
  cfg.h = h;
  cfg.dt = dt;
  for (int i = 0; i < 3; ++i) {
    cfg.lo[i] = i < dim ? -half_width : 0;
    cfg.hi[i] = i < dim ? half_width : 0;
  }
  return cfg;
}

GridConfig GridConfig::cell_centered(int dim, const Vec& center, double half_width, double h, double dt) {
  GridConfig cfg;
  cfg.h = h;
  cfg.dt = dt;
  const double w = (std::ceil(half_width / h) + 0.5) * h;
  for (int i = 0; i < 3; ++i) {
    cfg.lo[i] = i < dim ? center[i] - w : 0;
    cfg.hi[i] = i < dim ? center[i] + w : 0;
  }
  return cfg;
}

std::vector<std::array<long, 3>> stencil_offsets(int dim, int radius) {
  std::vector<std::array<long, 3>> out;
  const long r = radius;
  const long rz = dim == 3 ? r : 0;
  for (long a = -r; a <= r; ++a)
    for (long b = -r; b <= r; ++b)
      for (long c = -rz; c <= rz; ++c) {
        if (!a && !b && !c) continue;
        if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) != 1) continue;
        out.push_back({a, b, c});
      }
  return out;
}

std::vector<Vec> control_directions(int dim, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int j = 0; j < count; ++j) {
      const double a = 2 * std::numbers::pi * j / count;
      dirs.push_back({std::cos(a), std::sin(a), 0});
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
      const double z = 1 - (2.0 * j + 1) / count;
      const double r = std::sqrt(std::max(0.0, 1 - z * z));
      dirs.push_back({r * std::cos(golden * j), r * std::sin(golden * j), z});
    }
  }
  return dirs;
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorCode::Io, "rle: truncated stream");
  return v;
}

}  // namespace

void write_rle(std::ostream& out, const Grid& grid, double scale, const std::vector<std::int32_t>& values) {
  if (values.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "rle: value count != grid size");
  out.write("GHRL", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dim()));
  for (long n : grid.extent()) put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<double>(out, grid.h());
  for (double l : grid.lo()) put<double>(out, l);
  put<double>(out, scale);
  std::vector<std::pair<std::uint32_t, std::int32_t>> runs;
  for (std::int32_t v : values) {
    if (!runs.empty() && runs.back().second == v && runs.back().first < UINT32_MAX) ++runs.back().first;
    else runs.emplace_back(1, v);
  }
  put<std::uint64_t>(out, runs.size());
  for (const auto& [len, v] : runs) {
    put<std::uint32_t>(out, len);
    put<std::int32_t>(out, v);
  }
}

std::vector<std::int32_t> read_rle(std::istream& in, Grid& grid, double& scale) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GHRL", 4) != 0) throw Error(ErrorCode::Io, "rle: bad magic");
  if (get<std::uint32_t>(in) != 1) throw Error(ErrorCode::Io, "rle: unsupported version");
  const int dim = static_cast<int>(get<std::uint32_t>(in));
  std::array<long, 3> n{};
  for (auto& v : n) v = get<std::uint32_t>(in);
  const double h = get<double>(in);
  Vec lo{};
  for (auto& v : lo) v = get<double>(in);
  scale = get<double>(in);
  Vec hi = lo;
  for (int i = 0; i < dim; ++i) hi[i] = lo[i] + (static_cast<double>(n[i]) - 0.5) * h;
  grid = Grid(dim, h, lo, hi);
  const auto runs = get<std::uint64_t>(in);
  std::vector<std::int32_t> values;
  values.reserve(grid.size());
  for (std::uint64_t r = 0; r < runs; ++r) {
    const auto len = get<std::uint32_t>(in);
    const auto v = get<std::int32_t>(in);
    values.insert(values.end(), len, v);
  }
  if (values.size() != grid.size()) throw Error(ErrorCode::Io, "rle: run lengths do not cover the grid");
  return values;
}

}  // namespace ghomog
