#include "ghomog/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "ghomog/field.hpp"
#include "ghomog/reachability.hpp"

namespace ghomog {

LatticeWindow::LatticeWindow(int dim, const Site& lo, const Site& extent) : dim_(dim), lo_(lo), n_(extent) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "lattice dimension must be 2 or 3");
  for (int i = 0; i < 3; ++i) {
    if (i >= dim) {
      lo_[i] = 0;
      n_[i] = 1;
    } else if (n_[i] < 1) {
      throw Error(ErrorCode::InvalidArgument, "lattice window must be non-empty");
    }
  }
}

LatticeWindow LatticeWindow::cube(int dim, long R) {
  if (R < 0) throw Error(ErrorCode::InvalidArgument, "cube radius must be >= 0");
  return LatticeWindow(dim, {-R, -R, -R}, {2 * R + 1, 2 * R + 1, 2 * R + 1});
}

bool LatticeWindow::contains(const Site& s) const {
  for (int i = 0; i < 3; ++i)
    if (s[i] < lo_[i] || s[i] >= lo_[i] + n_[i]) return false;
  return true;
}

std::size_t LatticeWindow::index(const Site& s) const {
  return static_cast<std::size_t>(((s[0] - lo_[0]) * n_[1] + (s[1] - lo_[1])) * n_[2] + (s[2] - lo_[2]));
}

Site LatticeWindow::site(std::size_t idx) const {
  Site s{};
  s[2] = static_cast<long>(idx % static_cast<std::size_t>(n_[2])) + lo_[2];
  idx /= static_cast<std::size_t>(n_[2]);
  s[1] = static_cast<long>(idx % static_cast<std::size_t>(n_[1])) + lo_[1];
  s[0] = static_cast<long>(idx / static_cast<std::size_t>(n_[1])) + lo_[0];
  return s;
}

double SiteLattice::open_fraction() const {
  if (open.empty()) return 0;
  return static_cast<double>(std::count(open.begin(), open.end(), 1)) / static_cast<double>(open.size());
}

void SiteLattice::write_text(std::ostream& out) const {
  const auto& lo = window.lo();
  const auto& n = window.extent();
  out << "lattice " << window.dim() << ' ' << lo[0] << ' ' << lo[1] << ' ' << lo[2] << ' ' << n[0] << ' ' << n[1]
      << ' ' << n[2] << '\n';
  for (long k = 0; k < n[2]; ++k) {
    if (k) out << '\n';
    for (long j = 0; j < n[1]; ++j) {
      for (long i = 0; i < n[0]; ++i) out << (is_open({lo[0] + i, lo[1] + j, lo[2] + k}) ? '.' : '#');
      out << '\n';
    }
  }
}

SiteLattice SiteLattice::read_text(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::Io, "lattice text: missing header");
  std::istringstream hs(header);
  std::string tag;
  int dim = 0;
  Site lo{}, n{};
  hs >> tag >> dim >> lo[0] >> lo[1] >> lo[2] >> n[0] >> n[1] >> n[2];
  if (!hs || tag != "lattice") throw Error(ErrorCode::Io, "lattice text: malformed header");
  SiteLattice out;
  out.window = LatticeWindow(dim, lo, n);
  out.open.assign(out.window.size(), 0);
  std::string line;
  for (long k = 0; k < n[2]; ++k) {
    if (k && (!std::getline(in, line) || !line.empty())) throw Error(ErrorCode::Io, "lattice text: expected blank line");
    for (long j = 0; j < n[1]; ++j) {
      if (!std::getline(in, line) || static_cast<long>(line.size()) != n[0])
        throw Error(ErrorCode::Io, "lattice text: row " + std::to_string(j) + " has wrong length");
      for (long i = 0; i < n[0]; ++i) {
        if (line[i] != '.' && line[i] != '#') throw Error(ErrorCode::Io, "lattice text: unexpected character");
        out.open[out.window.index({lo[0] + i, lo[1] + j, lo[2] + k})] = line[i] == '.';
      }
    }
  }
  return out;
}

SiteLattice iid_lattice(int dim, long R, double p, std::uint64_t seed) {
  if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
  SiteLattice out;
  out.window = LatticeWindow::cube(dim, R);
  out.open.resize(out.window.size());
  for (std::size_t i = 0; i < out.open.size(); ++i) {
    const Site s = out.window.site(i);
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(s[0]));
    h = hash_combine(h, static_cast<std::uint64_t>(s[1]));
    h = hash_combine(h, static_cast<std::uint64_t>(s[2]));
    out.open[i] = unit_double(h) < p ? 1 : 0;
  }
  return out;
}

double site_passage_diameter(const Field& field, const Site& v, double cap, const ClassifyConfig& cfg) {
  const int d = field.dim();
  const double radius = std::sqrt(static_cast<double>(d));
  const Vec center{double(v[0]), double(v[1]), d == 3 ? double(v[2]) : 0.0};
  const long m = static_cast<long>(std::floor(radius / cfg.sample_spacing + 1e-9));
  std::vector<Vec> samples;
  for (long a = -m; a <= m; ++a)
    for (long b = -m; b <= m; ++b)
      for (long c = (d == 3 ? -m : 0); c <= (d == 3 ? m : 0); ++c) {
        const Vec off{a * cfg.sample_spacing, b * cfg.sample_spacing, c * cfg.sample_spacing};
        if (norm(off) <= radius + 1e-12) samples.push_back(center + off);
      }

  const double reach = required_radius(field, cap);
  const long half_cells = static_cast<long>(std::ceil(reach / cfg.h)) + 1;
  double worst = 0;
  for (const Vec& x : samples) {
    GridConfig g;
    g.h = cfg.h;
    g.dt = cfg.dt;
    for (int i = 0; i < 3; ++i) {
      g.lo[i] = i < d ? x[i] - (half_cells + 0.5) * cfg.h : 0;
      g.hi[i] = i < d ? x[i] + (half_cells + 0.5) * cfg.h : 0;
    }
    PropagateOptions opts;
    opts.t_max = cap;
    opts.targets = samples;
    const auto arr = solve_arrivals(field, x, g, opts);
    for (const Vec& y : samples) {
      const double t = arr->time[*arr->grid.cell_of(y)];
      if (!std::isfinite(t)) return INFINITY;
      worst = std::max(worst, t);
    }
  }
  return worst;
}

SiteLattice classify_sites(const Field& field, long R, double threshold, const ClassifyConfig& cfg) {
  if (!(threshold > 0)) throw Error(ErrorCode::InvalidArgument, "classification threshold must be > 0");
  if (!(cfg.sample_spacing > 0)) throw Error(ErrorCode::InvalidArgument, "sample spacing must be > 0");
  SiteLattice out;
  out.window = LatticeWindow::cube(field.dim(), R);
  out.open.assign(out.window.size(), 0);
  const std::size_t n = out.open.size();
  const int workers = std::max(1, cfg.threads);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers))
        out.open[i] = site_passage_diameter(field, out.window.site(i), threshold, cfg) <= threshold ? 1 : 0;
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::int32_t> components(const LatticeWindow& window, const std::vector<std::uint8_t>& mask,
                                     std::size_t* count) {
  std::vector<std::int32_t> label(window.size(), -1);
  std::int32_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < label.size(); ++s) {
    if (!mask[s] || label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      window.for_each_neighbor(u, [&](std::size_t v) {
        if (mask[v] && label[v] < 0) {
          label[v] = next;
          stack.push_back(v);
        }
      });
    }
    ++next;
  }
  if (count) *count = static_cast<std::size_t>(next);
  return label;
}

std::vector<std::size_t> ClusterDecomposition::members(std::int32_t id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cluster_of.size(); ++i)
    if (cluster_of[i] == id) out.push_back(i);
  return out;
}

ClusterDecomposition clusters(const SiteLattice& lattice) {
  const auto& w = lattice.window;
  ClusterDecomposition out;
  out.cluster_of.assign(w.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (out.cluster_of[s] >= 0) continue;
    const auto id = static_cast<std::int32_t>(out.size.size());
    const std::uint8_t state = lattice.open[s];
    std::size_t count = 0;
    out.cluster_of[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      ++count;
      w.for_each_neighbor(u, [&](std::size_t v) {
        if (out.cluster_of[v] < 0 && lattice.open[v] == state) {
          out.cluster_of[v] = id;
          stack.push_back(v);
        }
      });
    }
    out.size.push_back(count);
    out.open.push_back(state);
  }
  return out;
}

std::vector<std::size_t> cl_of(const SiteLattice& lattice, const std::vector<std::size_t>& S) {
  const auto& w = lattice.window;
  std::vector<std::uint8_t> seen(w.size(), 0);
  std::vector<std::size_t> stack, out;
  for (std::size_t s : S) {
    if (s >= w.size()) throw Error(ErrorCode::InvalidArgument, "cl: site outside window");
    if (!lattice.open[s] && !seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    out.push_back(u);
    w.for_each_neighbor(u, [&](std::size_t v) {
      if (!lattice.open[v] && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

Boundaries boundaries(const LatticeWindow& window, const std::vector<std::size_t>& E) {
  std::vector<std::uint8_t> in(window.size(), 0);
  for (std::size_t s : E) in.at(s) = 1;
  std::vector<std::uint8_t> outer_mark(window.size(), 0);
  Boundaries b;
  for (std::size_t s : E) {
    bool touches = false;
    window.for_each_neighbor(s, [&](std::size_t v) {
      if (!in[v]) {
        touches = true;
        outer_mark[v] = 1;
      }
    });
    if (touches) b.inner.push_back(s);
  }
  for (std::size_t i = 0; i < outer_mark.size(); ++i)
    if (outer_mark[i]) b.outer.push_back(i);
  std::sort(b.inner.begin(), b.inner.end());
  b.inner.erase(std::unique(b.inner.begin(), b.inner.end()), b.inner.end());
  return b;
}

bool is_connected(const LatticeWindow& window, const std::vector<std::size_t>& sites) {
  if (sites.empty()) return true;
  std::vector<std::uint8_t> mask(window.size(), 0);
  for (std::size_t s : sites) mask.at(s) = 1;
  std::size_t count = 0;
  components(window, mask, &count);
  return count == 1;
}

UnicoherenceReport check_unicoherence(const LatticeWindow& window, const std::vector<std::size_t>& C) {
  if (C.empty() || !is_connected(window, C))
    throw Error(ErrorCode::Domain, "unicoherence check needs a non-empty connected set");
  std::vector<std::uint8_t> rest(window.size(), 1);
  for (std::size_t s : C) rest[s] = 0;
  UnicoherenceReport report;
  const auto label = components(window, rest, &report.components);
  std::vector<std::vector<std::size_t>> parts(report.components);
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] >= 0) parts[static_cast<std::size_t>(label[i])].push_back(i);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Boundaries b = boundaries(window, parts[k]);
    const bool inner_ok = is_connected(window, b.inner);
    const bool outer_ok = is_connected(window, b.outer);
    if (!inner_ok || !outer_ok) {
      report.pass = false;
      report.witness = "component " + std::to_string(k) + " (" + std::to_string(parts[k].size()) + " sites): " +
                       (inner_ok ? "" : "inner boundary disconnected ") + (outer_ok ? "" : "outer boundary disconnected");
      break;
    }
  }
  return report;
}

std::vector<std::size_t> random_connected_set(const LatticeWindow& window, std::size_t size, std::uint64_t seed) {
  size = std::min(size, window.size());
  std::mt19937_64 rng(seed);
  Site mid{};
  for (int i = 0; i < 3; ++i) mid[i] = window.lo()[i] + window.extent()[i] / 2;
  std::vector<std::uint8_t> in(window.size(), 0), queued(window.size(), 0);
  std::vector<std::size_t> out, frontier;
  const std::size_t start = window.index(mid);
  in[start] = 1;
  out.push_back(start);
  auto grow = [&](std::size_t u) {
    window.for_each_neighbor(u, [&](std::size_t v) {
      if (!in[v] && !queued[v]) {
        queued[v] = 1;
        frontier.push_back(v);
      }
    });
  };
  grow(start);
  while (out.size() < size && !frontier.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const std::size_t j = pick(rng);
    const std::size_t v = frontier[j];
    frontier[j] = frontier.back();
    frontier.pop_back();
    in[v] = 1;
    out.push_back(v);
    grow(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool giant_cluster_event(const SiteLattice& lattice, long R, long n) {
  if (R < 0 || n < 0) throw Error(ErrorCode::InvalidArgument, "giant cluster event needs R, n >= 0");
  const int d = lattice.window.dim();
  const LatticeWindow big = LatticeWindow::cube(d, R + n);
  const Site corner_lo{-(R + n), -(R + n), d == 3 ? -(R + n) : 0};
  const Site corner_hi{R + n, R + n, d == 3 ? R + n : 0};
  if (!lattice.window.contains(corner_lo) || !lattice.window.contains(corner_hi))
    throw Error(ErrorCode::Window, "lattice window does not contain Q_{R+n}");

  SiteLattice sub;
  sub.window = big;
  sub.open.resize(big.size());
  for (std::size_t i = 0; i < big.size(); ++i) sub.open[i] = lattice.open[lattice.window.index(big.site(i))];
  const ClusterDecomposition dec = clusters(sub);
  std::int32_t giant = -1;
  for (std::size_t id = 0; id < dec.size.size(); ++id)
    if (dec.open[id] && (giant < 0 || dec.size[id] > dec.size[static_cast<std::size_t>(giant)]))
      giant = static_cast<std::int32_t>(id);

  std::vector<std::uint8_t> rest(big.size(), 1);
  if (giant >= 0)
    for (std::size_t i = 0; i < big.size(); ++i)
      if (dec.cluster_of[i] == giant) rest[i] = 0;
  std::size_t count = 0;
  const auto label = components(big, rest, &count);
  std::vector<std::size_t> sizes(count, 0);
  std::vector<std::uint8_t> meets_inner(count, 0);
  for (std::size_t i = 0; i < big.size(); ++i) {
    if (label[i] < 0) continue;
    const auto k = static_cast<std::size_t>(label[i]);
    ++sizes[k];
    const Site s = big.site(i);
    bool inside = true;
    for (int a = 0; a < d; ++a) inside = inside && std::abs(s[a]) <= R;
    if (inside) meets_inner[k] = 1;
  }
  for (std::size_t k = 0; k < count; ++k)
    if (meets_inner[k] && sizes[k] > static_cast<std::size_t>(n)) return false;
  return true;
}

}  // namespace ghomog
