#include "ghomog/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>
#include <set>

#include "ghomog/config.hpp"

namespace ghomog {

Site site_of(const Vec& x, int dim) {
  Site s{0, 0, 0};
  for (int i = 0; i < dim; ++i) s[i] = std::lround(x[i]);
  return s;
}

double SkeletonPath::max_step() const {
  double m = 0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) m = std::max(m, norm(waypoints[i] - waypoints[i - 1]));
  return m;
}

void SkeletonPath::write_csv(std::ostream& out) const {
  out << "index,x,y,z,case\n";
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    out << i;
    for (double c : waypoints[i]) out << ',' << format_double(c);
    out << ',' << (i == 0 ? 0 : step_case[i - 1]) << '\n';
  }
}

namespace {

struct Crossing {
  std::size_t site;
  double t_in, t_out;
};

// Parameter interval where x + t (y - x) lies in the unit cube around s.
bool clip(const Vec& x, const Vec& dir, const Site& s, int d, double& t_in, double& t_out) {
  t_in = 0;
  t_out = 1;
  for (int i = 0; i < d; ++i) {
    const double lo = s[i] - 0.5, hi = s[i] + 0.5;
    if (std::abs(dir[i]) < 1e-15) {
      if (x[i] < lo || x[i] > hi) return false;
      continue;
    }
    double a = (lo - x[i]) / dir[i], b = (hi - x[i]) / dir[i];
    if (a > b) std::swap(a, b);
    t_in = std::max(t_in, a);
    t_out = std::min(t_out, b);
  }
  return t_out - t_in > 1e-12;
}

long linf(const Site& a, const Site& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

// Sites whose closed cube contains p. More than one when p sits on a face, edge or corner.
std::vector<Site> cubes_containing(const Vec& p, int d) {
  std::vector<Site> out{Site{0, 0, 0}};
  for (int i = 0; i < d; ++i) {
    const long lo = static_cast<long>(std::floor(p[i] + 0.5 - 1e-9));
    const long hi = static_cast<long>(std::floor(p[i] + 0.5 + 1e-9));
    std::vector<Site> next;
    for (Site s : out)
      for (long v = lo; v <= hi; ++v) {
        s[i] = v;
        next.push_back(s);
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

SkeletonPath detour_skeleton(const SiteLattice& lattice, const Vec& x, const Vec& y) {
  const LatticeWindow& win = lattice.window;
  const int d = win.dim();
  const Site sx = site_of(x, d), sy = site_of(y, d);
  if (!win.contains(sx) || !win.contains(sy)) throw Error(ErrorCode::Window, "skeleton endpoints outside the lattice");
  const ClusterDecomposition dec = clusters(lattice);
  const std::int32_t C = dec.cluster_of[win.index(sx)];
  if (!dec.open[static_cast<std::size_t>(C)] || dec.cluster_of[win.index(sy)] != C)
    throw Error(ErrorCode::Domain, "skeleton endpoints are not in one open cluster");
  auto in_c = [&](std::size_t i) { return dec.cluster_of[i] == C; };

  const Vec dir = y - x;
  const double len = norm(dir);
  const double r = std::sqrt(static_cast<double>(d));
  auto at = [&](double t) { return x + t * dir; };

  // A: sites whose cube meets the segment, with their parameter intervals.
  std::vector<Crossing> A;
  {
    Site lo{}, hi{};
    for (int i = 0; i < 3; ++i) {
      lo[i] = i < d ? static_cast<long>(std::floor(std::min(x[i], y[i]))) - 1 : 0;
      hi[i] = i < d ? static_cast<long>(std::ceil(std::max(x[i], y[i]))) + 1 : 0;
    }
    for (long a = lo[0]; a <= hi[0]; ++a)
      for (long b = lo[1]; b <= hi[1]; ++b)
        for (long c = lo[2]; c <= hi[2]; ++c) {
          const Site s{a, b, c};
          double t0, t1;
          if (win.contains(s) && clip(x, dir, s, d, t0, t1)) A.push_back({win.index(s), t0, t1});
        }
    std::sort(A.begin(), A.end(), [](const Crossing& p, const Crossing& q) { return p.t_in < q.t_in; });
  }

  SkeletonPath path;
  {
    std::vector<std::size_t> sites;
    for (const auto& c : A) sites.push_back(c.site);
    path.cl_A = cl_of(lattice, sites).size();
    path.count_bound = std::pow(2.0, d) * (1 + len) + static_cast<double>(path.cl_A) +
                       (std::pow(3.0, d) + 2) * static_cast<double>(path.cl_A);
  }

  std::vector<std::uint8_t> rest(win.size(), 1);
  for (std::size_t i = 0; i < win.size(); ++i)
    if (in_c(i)) rest[i] = 0;
  const auto comp = components(win, rest);
  std::map<std::int32_t, std::vector<std::size_t>> outer_cache;
  auto outer_of = [&](std::int32_t f) -> const std::vector<std::size_t>& {
    auto it = outer_cache.find(f);
    if (it != outer_cache.end()) return it->second;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (comp[i] == f) members.push_back(i);
    return outer_cache.emplace(f, boundaries(win, members).outer).first->second;
  };

  auto push = [&](const Vec& p, int which) {
    if (norm(p - path.waypoints.back()) < 1e-12) return;
    path.waypoints.push_back(p);
    path.step_case.push_back(which);
  };
  auto center = [&](std::size_t i) {
    const Site s = win.site(i);
    return Vec{double(s[0]), double(s[1]), double(s[2])};
  };

  path.waypoints.push_back(x);
  double s = 0;
  std::set<std::int32_t> seen;
  const std::size_t guard = 4 * (win.size() + static_cast<std::size_t>(len) + 8);
  for (std::size_t iter = 0;; ++iter) {
    if (iter > guard) throw Error(ErrorCode::Internal, "skeleton construction did not terminate");
    if (len * (1 - s) <= r + 1e-12) {
      push(y, 1);
      break;
    }
    const double sz = s + r / len;
    const auto zc = cubes_containing(at(sz), d);
    if (std::any_of(zc.begin(), zc.end(), [&](const Site& z) { return win.contains(z) && in_c(win.index(z)); })) {
      push(at(sz), 2);
      s = sz;
      continue;
    }

    // Case 3: first blocking cube after s.
    const Crossing* w = nullptr;
    double tx = 0;
    for (const auto& c : A) {
      if (in_c(c.site) || c.t_out <= s + 1e-12) continue;
      const double enter = std::max(c.t_in, s);
      if (!w || enter < tx) {
        w = &c;
        tx = enter;
      }
    }
    if (!w) throw Error(ErrorCode::Internal, "skeleton: blocked step without a blocking cube");
    const Site ws = win.site(w->site);
    const std::size_t* p1 = nullptr;
    for (const auto& c : A)
      if (in_c(c.site) && c.t_in <= tx + 1e-9 && c.t_out >= tx - 1e-9 && linf(win.site(c.site), ws) <= 1) {
        p1 = &c.site;
        break;
      }
    if (!p1) throw Error(ErrorCode::Internal, "skeleton: no open cube before the blocking cube");

    const std::int32_t F = comp[w->site];
    if (!seen.insert(F).second) path.revisited = true;
    path.detour_components.push_back(F);
    const auto& outer = outer_of(F);
    const std::set<std::size_t> ring(outer.begin(), outer.end());

    const Crossing* best = nullptr;
    double best_score = -INFINITY;
    for (const auto& c : A) {
      if (!ring.count(c.site)) continue;
      const double score = dot(center(c.site), dir);
      if (!best || score > best_score + 1e-12 ||
          (std::abs(score - best_score) <= 1e-12 && win.site(c.site) < win.site(best->site))) {
        best = &c;
        best_score = score;
      }
    }
    if (!best || best->t_out <= tx + 1e-9) {
      ++path.fallbacks;
      best = nullptr;
      for (const auto& c : A)
        if (ring.count(c.site) && (!best || c.t_out > best->t_out)) best = &c;
      if (!best || best->t_out <= tx + 1e-9) throw Error(ErrorCode::Internal, "skeleton: detour makes no progress");
    }

    // Breadth-first walk inside the outer boundary from p1 to the chosen site.
    std::map<std::size_t, std::size_t> parent;
    std::deque<std::size_t> queue{*p1};
    parent[*p1] = *p1;
    while (!queue.empty() && !parent.count(best->site)) {
      const std::size_t u = queue.front();
      queue.pop_front();
      win.for_each_neighbor(u, [&](std::size_t v) {
        if (ring.count(v) && !parent.count(v)) {
          parent[v] = u;
          queue.push_back(v);
        }
      });
    }
    if (!parent.count(best->site)) throw Error(ErrorCode::Internal, "skeleton: outer boundary is disconnected");
    std::vector<std::size_t> walk;
    for (std::size_t v = best->site;; v = parent[v]) {
      walk.push_back(v);
      if (v == *p1) break;
    }
    std::reverse(walk.begin(), walk.end());

    push(at(tx), 3);
    for (std::size_t v : walk) push(center(v), 3);
    s = best->t_out;
    push(at(s), 3);
  }
  return path;
}

}  // namespace ghomog
