#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ghomog/field.hpp"
#include "ghomog/percolation.hpp"

using namespace ghomog;

namespace {
SiteLattice uniform(int dim, long R, bool open) {
  SiteLattice l;
  l.window = LatticeWindow::cube(dim, R);
  l.open.assign(l.window.size(), open ? 1 : 0);
  return l;
}
std::vector<std::size_t> square(const LatticeWindow& w, long half) {
  std::vector<std::size_t> out;
  for (long a = -half; a <= half; ++a)
    for (long b = -half; b <= half; ++b) out.push_back(w.index({a, b, 0}));
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace

TEST_CASE("windows and adjacency") {
  const auto w = LatticeWindow::cube(2, 3);
  CHECK(w.size() == 49);
  CHECK(w.contains({3, -3, 0}));
  CHECK_FALSE(w.contains({4, 0, 0}));
  CHECK(w.site(w.index({-2, 1, 0})) == Site{-2, 1, 0});
  int n = 0;
  w.for_each_neighbor(w.index({0, 0, 0}), [&](std::size_t) { ++n; });
  CHECK(n == 8);
  const auto w3 = LatticeWindow::cube(3, 1);
  n = 0;
  w3.for_each_neighbor(w3.index({0, 0, 0}), [&](std::size_t) { ++n; });
  CHECK(n == 26);
}

TEST_CASE("cluster decomposition partitions the window") {
  const SiteLattice l = iid_lattice(2, 6, 0.6, 3);
  const auto dec = clusters(l);
  std::size_t total = 0;
  for (std::size_t c = 0; c < dec.size.size(); ++c) {
    total += dec.size[c];
    for (std::size_t i : dec.members(static_cast<std::int32_t>(c))) CHECK(l.open[i] == dec.open[c]);
    CHECK(is_connected(l.window, dec.members(static_cast<std::int32_t>(c))));
  }
  CHECK(total == l.window.size());
  // Ids follow the lowest member index.
  for (std::size_t c = 1; c < dec.size.size(); ++c)
    CHECK(dec.members(static_cast<std::int32_t>(c - 1)).front() < dec.members(static_cast<std::int32_t>(c)).front());
}

TEST_CASE("cl(S)") {
  SiteLattice l = uniform(2, 4, true);
  const std::vector<std::size_t> S{l.window.index({0, 0, 0})};
  CHECK(cl_of(l, S).empty());
  l.open[l.window.index({0, 0, 0})] = 0;
  CHECK(cl_of(l, S) == S);
  l.open[l.window.index({1, 1, 0})] = 0;  // diagonal neighbor joins
  l.open[l.window.index({3, 3, 0})] = 0;  // isolated, does not
  CHECK(cl_of(l, S).size() == 2);

  const SiteLattice r = iid_lattice(2, 10, 0.7, 9);
  std::vector<std::size_t> line;
  for (long i = -5; i <= 5; ++i) line.push_back(r.window.index({i, 0, 0}));
  const auto cl = cl_of(r, line);
  for (std::size_t i : cl) CHECK_FALSE(r.open[i]);
  // Every closed site adjacent to cl(S) is in cl(S).
  const std::set<std::size_t> in(cl.begin(), cl.end());
  for (std::size_t i : cl)
    r.window.for_each_neighbor(i, [&](std::size_t j) {
      if (!r.open[j]) CHECK(in.count(j));
    });
}

TEST_CASE("inner and outer boundaries") {
  const auto w = LatticeWindow::cube(2, 5);
  const auto one = boundaries(w, {w.index({0, 0, 0})});
  CHECK(one.inner.size() == 1);
  CHECK(one.outer.size() == 8);
  const auto sq = boundaries(w, square(w, 1));
  CHECK(sq.inner.size() == 8);
  CHECK(sq.outer.size() == 16);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto E = random_connected_set(w, 1 + seed % 30, seed);
    const auto b = boundaries(w, E);
    CHECK(b.outer.size() <= 8 * b.inner.size());
  }
}

TEST_CASE("unicoherence on small windows") {
  const LatticeWindow w(2, {0, 0, 0}, {5, 5, 1});
  const auto rep = check_unicoherence(w, {w.index({2, 2, 0})});
  CHECK(rep.pass);
  CHECK(rep.components == 1);
  const LatticeWindow w8(2, {0, 0, 0}, {8, 8, 1});
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto C = random_connected_set(w8, 1 + seed % 32, seed);
    REQUIRE(check_unicoherence(w8, C).pass);
  }
  const LatticeWindow w5(3, {0, 0, 0}, {5, 5, 5});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto C = random_connected_set(w5, 1 + seed % 60, seed);
    REQUIRE(check_unicoherence(w5, C).pass);
  }
  CHECK_THROWS_AS(check_unicoherence(w, {w.index({0, 0, 0}), w.index({4, 4, 0})}), Error);
}

TEST_CASE("giant-cluster event") {
  CHECK(giant_cluster_event(uniform(2, 6, true), 3, 0));
  CHECK(giant_cluster_event(uniform(2, 6, true), 2, 4));
  CHECK_FALSE(giant_cluster_event(uniform(2, 6, false), 3, 3));
  CHECK_THROWS_AS(giant_cluster_event(uniform(2, 4, true), 3, 3), Error);
  SiteLattice hole = uniform(2, 6, true);
  hole.open[hole.window.index({0, 0, 0})] = 0;
  CHECK_FALSE(giant_cluster_event(hole, 3, 0));
  CHECK(giant_cluster_event(hole, 3, 1));
}

TEST_CASE("lattice text round trip") {
  const SiteLattice l = iid_lattice(3, 2, 0.5, 4);
  std::stringstream ss;
  l.write_text(ss);
  const SiteLattice back = SiteLattice::read_text(ss);
  CHECK(back.window.lo() == l.window.lo());
  CHECK(back.window.extent() == l.window.extent());
  CHECK(back.open == l.open);
  CHECK(iid_lattice(2, 5, 0.5, 8).open_fraction() > 0);
}

TEST_CASE("site classification from the field") {
  FieldSpec zero;
  zero.amplitude = 0;
  const Field f0(zero, 1);
  ClassifyConfig cfg;
  cfg.h = 0.5;
  cfg.dt = 0.1;
  cfg.sample_spacing = 0.75;
  CHECK(classify_sites(f0, 1, 2 * std::sqrt(2.0) + 1, cfg).open_fraction() == 1.0);
  CHECK(classify_sites(f0, 1, 0.1, cfg).open_fraction() == 0.0);

  FieldSpec s;
  s.amplitude = 0.9;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Field f(s, seed);
    double prev = -1;
    for (double C : {3.0, 3.5, 4.5}) {
      const double p = classify_sites(f, 1, C, cfg).open_fraction();
      CHECK(p >= prev);
      prev = p;
    }
  }
}
