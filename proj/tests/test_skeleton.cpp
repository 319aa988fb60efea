#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ghomog/skeleton.hpp"

using namespace ghomog;

namespace {
SiteLattice all_open(int dim, long R) {
  SiteLattice l;
  l.window = LatticeWindow::cube(dim, R);
  l.open.assign(l.window.size(), 1);
  return l;
}

void check_chain(const SiteLattice& l, const SkeletonPath& p, const Vec& x, const Vec& y) {
  const int d = l.window.dim();
  REQUIRE(p.waypoints.size() >= 2);
  CHECK(norm(p.waypoints.front() - x) < 1e-12);
  CHECK(norm(p.waypoints.back() - y) < 1e-12);
  CHECK(p.step_case.size() == p.steps());
  CHECK(p.max_step() <= std::sqrt(double(d)) + 1e-9);
  CHECK(static_cast<double>(p.steps()) <= p.count_bound);
  // Each waypoint lies in the closed unit cube of some open site.
  for (const Vec& w : p.waypoints) {
    bool covered = false;
    for (std::size_t i = 0; i < l.window.size() && !covered; ++i) {
      if (!l.open[i]) continue;
      const Site s = l.window.site(i);
      double sup = 0;
      for (int k = 0; k < d; ++k) sup = std::max(sup, std::abs(w[k] - double(s[k])));
      covered = sup <= 0.5 + 1e-9;
    }
    CHECK(covered);
  }
}
}  // namespace

TEST_CASE("all open: straight skeleton with ceil(|x-y| / sqrt d) steps") {
  for (int d : {2, 3}) {
    const SiteLattice l = all_open(d, d == 2 ? 15 : 8);
    const Vec x{-5, 0, 0}, y{d == 2 ? 10.0 : 6.0, 3, 0};
    const SkeletonPath p = detour_skeleton(l, x, y);
    check_chain(l, p, x, y);
    CHECK(p.steps() == static_cast<std::size_t>(std::ceil(norm(y - x) / std::sqrt(double(d)))));
    CHECK(p.detour_components.empty());
    // Collinear.
    const Vec u = (1 / norm(y - x)) * (y - x);
    for (const Vec& w : p.waypoints) {
      const Vec r = w - x;
      CHECK(norm(r - dot(r, u) * u) < 1e-9);
    }
  }
  const SiteLattice l = all_open(2, 15);
  CHECK(detour_skeleton(l, {-5, 0, 0}, {10.5, 0, 0}).steps() == 11);
}

TEST_CASE("a closed blob forces one detour within the count bound") {
  SiteLattice l = all_open(2, 12);
  for (long a = 1; a <= 3; ++a)
    for (long b = -1; b <= 1; ++b) l.open[l.window.index({a, b, 0})] = 0;
  const Vec x{-5, 0, 0}, y{9, 0, 0};
  const SkeletonPath p = detour_skeleton(l, x, y);
  check_chain(l, p, x, y);
  CHECK(p.detour_components.size() >= 1);
  CHECK(std::count(p.step_case.begin(), p.step_case.end(), 3) >= 1);
  CHECK_FALSE(p.revisited);
  CHECK(static_cast<double>(p.steps()) <= norm(y - x) / std::sqrt(2.0) + 9 * 9 + 2);
}

TEST_CASE("random supercritical lattices comply") {
  for (int d : {2, 3}) {
    for (std::uint64_t seed = 0; seed < (d == 2 ? 60u : 15u); ++seed) {
      const SiteLattice l = iid_lattice(d, d == 2 ? 12 : 6, 0.85, seed);
      const auto dec = clusters(l);
      std::int32_t best = -1;
      for (std::size_t c = 0; c < dec.size.size(); ++c)
        if (dec.open[c] && (best < 0 || dec.size[c] > dec.size[static_cast<std::size_t>(best)]))
          best = static_cast<std::int32_t>(c);
      REQUIRE(best >= 0);
      const auto m = dec.members(best);
      auto at = [&](std::size_t k) {
        const Site s = l.window.site(m[k % m.size()]);
        return Vec{double(s[0]), double(s[1]), double(s[2])};
      };
      const Vec x = at(seed * 7), y = at(seed * 131 + m.size() / 2);
      const SkeletonPath p = detour_skeleton(l, x, y);
      check_chain(l, p, x, y);
      CHECK_FALSE(p.revisited);
    }
  }
}

TEST_CASE("endpoints in different clusters") {
  SiteLattice l = all_open(2, 6);
  for (long b = -6; b <= 6; ++b) l.open[l.window.index({0, b, 0})] = 0;
  try {
    detour_skeleton(l, {-3, 0, 0}, {3, 0, 0});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("csv export") {
  const SkeletonPath p = detour_skeleton(all_open(2, 8), {-4, 0, 0}, {4, 1, 0});
  std::ostringstream out;
  p.write_csv(out);
  const std::string s = out.str();
  CHECK(s.rfind("index,x,y,z,case\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(p.waypoints.size()) + 1);
}

TEST_CASE("diagonal through cube corners after a detour") {
  // This lattice sends the resumed segment exactly through cube corners, where rounding is a tie.
  const SiteLattice l = iid_lattice(2, 12, 0.95, 11440496059556717439ULL);
  const Vec x{-5, 11, 0}, y{10, -4, 0};
  const SkeletonPath p = detour_skeleton(l, x, y);
  check_chain(l, p, x, y);
}
