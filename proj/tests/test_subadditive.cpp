#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ghomog/subadditive.hpp"

using namespace ghomog;

namespace {
bool is_permutation_of(const std::vector<std::size_t>& order, std::size_t n) {
  std::vector<std::size_t> s = order;
  std::sort(s.begin(), s.end());
  std::vector<std::size_t> want(n);
  std::iota(want.begin(), want.end(), 0);
  return s == want;
}

std::vector<Vec> random_ball(std::size_t n, int d, std::uint64_t seed) {
  std::vector<Vec> v;
  std::uint64_t k = seed * 1000;
  while (v.size() < n) {
    Vec u{0, 0, 0};
    for (int i = 0; i < d; ++i) u[i] = 2 * unit_double(mix64(++k)) - 1;
    if (norm(u) <= 1) v.push_back(u);
  }
  return v;
}
}  // namespace

TEST_CASE("rearrange: identical vectors") {
  const Vec x{0.3, -0.4, 0};
  const std::vector<Vec> v(7, x);
  const auto r = rearrange(v, x, 2);
  CHECK(is_permutation_of(r.order, 7));
  CHECK(r.max_deviation < 1e-12);
}

TEST_CASE("rearrange: four axis vectors") {
  const std::vector<Vec> v{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  const auto r = rearrange(v, {0, 0, 0}, 2);
  CHECK(is_permutation_of(r.order, 4));
  CHECK(r.max_deviation <= 4);
  CHECK(max_prefix_deviation(v, {0, 0, 0}, r.order) == doctest::Approx(r.max_deviation));
  CHECK(best_prefix_deviation(v, {0, 0, 0}) <= std::sqrt(2.0) + 1e-12);
}

TEST_CASE("rearrange: random recentered sets stay within 2d") {
  for (int d : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const std::size_t n = 2 + seed % 12;
      auto v = random_ball(n, d, seed);
      // Recenter to sum zero, then shrink back into the unit ball.
      Vec m{0, 0, 0};
      for (const Vec& u : v) m = m + u;
      m = (1.0 / double(n)) * m;
      double top = 0;
      for (Vec& u : v) {
        u = u - m;
        top = std::max(top, norm(u));
      }
      if (top > 1)
        for (Vec& u : v) u = (1 / top) * u;
      const auto r = rearrange(v, {0, 0, 0}, d);
      REQUIRE(is_permutation_of(r.order, n));
      CHECK(r.max_deviation <= 2 * d + 1e-9);
      if (n <= 8) CHECK(best_prefix_deviation(v, {0, 0, 0}) <= r.max_deviation + 1e-12);
    }
    // Non-zero mean.
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto v = random_ball(3 + seed % 20, d, seed + 777);
      Vec s{0, 0, 0};
      for (const Vec& u : v) s = s + u;
      const auto r = rearrange(v, (1.0 / double(v.size())) * s, d);
      CHECK(r.max_deviation <= 2 * d + 1e-9);
    }
  }
}

TEST_CASE("rearrange: input errors") {
  CHECK_THROWS_AS(rearrange({{1, 0, 0}, {0, 1, 0}}, {0, 0, 0}, 2), Error);
  CHECK_THROWS_AS(rearrange({{2, 0, 0}, {-2, 0, 0}}, {0, 0, 0}, 2), Error);
  try {
    rearrange({{1, 0, 0}}, {0, 0, 0}, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("rearrange: exact rational path") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int d = seed % 2 ? 3 : 2;
    std::vector<RVec> v;
    RVec sum{0, 0, 0};
    const std::size_t n = 3 + seed % 8;
    std::uint64_t k = seed * 97;
    while (v.size() + 1 < n) {
      RVec u{0, 0, 0};
      Rational sq = 0;
      for (int i = 0; i < d; ++i) {
        u[i] = Rational(static_cast<long>(mix64(++k) % 33) - 16, 64);
        sq += u[i] * u[i];
      }
      if (sq > Rational(1, 4)) continue;
      v.push_back(u);
      for (int i = 0; i < d; ++i) sum[i] += u[i];
    }
    // Last vector closes the sum to n x with x = 0 when it fits, else pick x = mean.
    RVec last{0, 0, 0};
    Rational sq = 0;
    for (int i = 0; i < d; ++i) {
      last[i] = -sum[i];
      sq += last[i] * last[i];
    }
    RVec x{0, 0, 0};
    if (sq > 1) {
      last = RVec{0, 0, 0};
      for (int i = 0; i < d; ++i) x[i] = sum[i] / Rational(static_cast<long>(n));
    }
    v.push_back(last);
    const auto r = rearrange_exact(v, x, d);
    CHECK(is_permutation_of(r.order, n));
    CHECK(r.max_deviation <= 2 * d + 1e-12);
  }
  std::vector<RVec> bad{{Rational(1), 0, 0}};
  CHECK_THROWS_AS(rearrange_exact(bad, {0, 0, 0}, 2), Error);
}

TEST_CASE("caratheodory") {
  const std::vector<Vec> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const auto one = caratheodory(sq, {1, 1, 0}, 2);
  CHECK(one.index == std::vector<std::size_t>{2});
  CHECK(one.weight == std::vector<double>{1.0});

  auto check = [](const std::vector<Vec>& pts, const Vec& target, int d) {
    const auto w = caratheodory(pts, target, d);
    CHECK(w.index.size() <= static_cast<std::size_t>(d + 1));
    Vec r{0, 0, 0};
    double total = 0;
    for (std::size_t i = 0; i < w.index.size(); ++i) {
      CHECK(w.weight[i] >= 0);
      total += w.weight[i];
      r = r + w.weight[i] * pts[w.index[i]];
    }
    CHECK(total == doctest::Approx(1).epsilon(1e-12));
    CHECK(norm(r - target) <= 1e-9);
  };
  check(sq, {0.5, 0.5, 0}, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = random_ball(20, 3, seed + 50);
    Vec m{0, 0, 0};
    for (const Vec& p : pts) m = m + p;
    check(pts, (1.0 / 20) * m, 3);
  }
  try {
    caratheodory(sq, {2, 2, 0}, 2);
    FAIL("expected outside-hull error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("oracle registry and supporting functionals") {
  auto& reg = OracleRegistry::instance();
  const auto names = reg.names();
  for (const char* n : {"sqrt", "log", "norm"}) CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(reg.make("nope", 2), Error);
  for (const auto& name : names) {
    const auto o = reg.make(name, 2);
    for (long a = -6; a <= 6; ++a)
      for (long b = -6; b <= 6; ++b) {
        const Vec v{double(a), double(b), 0};
        CHECK(o.f(v) >= 0);
        CHECK(o.f(v) >= o.fbar(v) - 1e-12);
        CHECK(o.f(v) <= o.growth * norm(v) + 1e-12 + (norm(v) == 0 ? o.f(v) : 0));
        const Vec x{3, -1, 0};
        CHECK(o.fbar_x(x, v) <= o.fbar(v) + 1e-12);  // supporting
        CHECK(norm(o.slope(x) - o.slope(2.5 * x)) < 1e-12);
      }
    CHECK(o.fbar_x({3, -1, 0}, {3, -1, 0}) == doctest::Approx(o.fbar({3, -1, 0})));
  }
  int calls = 0;
  reg.add("twice-norm", [&calls](int dim) {
    ++calls;
    SubadditiveOracle o;
    o.name = "twice-norm";
    o.dim = dim;
    o.growth = 2;
    o.f = [](const Vec& v) { return 2 * norm(v); };
    o.fbar = o.f;
    o.slope = [](const Vec& x) { return (2 / norm(x)) * x; };
    return o;
  });
  CHECK(reg.make("twice-norm", 3).f({0, 3, 4}) == 10);
  CHECK(calls == 1);
}

TEST_CASE("good set membership") {
  const auto o = OracleRegistry::instance().make("sqrt", 2);
  GoodSet g;
  g.oracle = &o;
  g.x = {16, 0, 0};
  g.C = 1;
  g.K = 1;
  CHECK(g.allowance() == doctest::Approx(4));
  CHECK(g.contains({1, 0, 0}));
  CHECK(g.contains({16, 0, 0}));  // f - fbar = 4 = allowance
  CHECK_FALSE(g.contains({17, 0, 0}));
  CHECK_FALSE(g.violation({0, 17, 0}).empty());
  g.K = 2;
  CHECK_FALSE(g.violation({17, 0, 0}).empty());  // overshoots fbar_x(x)
}

TEST_CASE("alexander step 1") {
  const auto o = OracleRegistry::instance().make("sqrt", 2);
  GoodSet g;
  g.oracle = &o;
  const double M = 8;
  g.x = {M, 0, 0};
  SUBCASE("identical increments x") {
    const auto c = alexander_step1(g, {{0, 0, 0}, {M, 0, 0}, {2 * M, 0, 0}, {3 * M, 0, 0}}, 3);
    CHECK(c.alpha == 1);
    CHECK(c.m == 3);
  }
  SUBCASE("unit-step greedy skeleton") {
    for (int n : {1, 2, 5}) {
      const auto sk = greedy_unit_skeleton(double(n) * g.x, 2);
      const auto c = alexander_step1(g, sk, n);
      CHECK(c.m == static_cast<std::size_t>(n * M));
      CHECK(c.alpha == doctest::Approx(1 / M));
      CHECK(c.points.size() <= 3);
      Vec r{0, 0, 0};
      for (std::size_t i = 0; i < c.points.size(); ++i) r = r + c.weights[i] * c.points[i];
      CHECK(norm(r - c.alpha * g.x) < 1e-9);
    }
  }
  SUBCASE("overshooting increment is named") {
    g.K = 2;
    g.C = 2;
    try {
      alexander_step1(g, {{0, 0, 0}, {-1, 0, 0}, {M, 0, 0}}, 1);
      FAIL("expected certificate error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Certificate);
      CHECK(std::string(e.what()).find("increment 2") != std::string::npos);
    }
  }
}

TEST_CASE("alexander reduction") {
  const auto o = OracleRegistry::instance().make("sqrt", 2);
  GoodSet g;
  g.oracle = &o;
  SUBCASE("trivial hull") {
    g.x = {4, 0, 0};
    const auto c = alexander_step1(g, {{0, 0, 0}, {4, 0, 0}}, 1);
    const auto r = alexander_reduce(g, c, g.x, 1);
    CHECK(norm(r.z) < 1e-12);
    CHECK(r.increments.size() == 1);
    CHECK(r.holds);
  }
  SUBCASE("x = (50, 0), t = 4") {
    g.x = {50, 0, 0};
    const auto c = alexander_step1(g, greedy_unit_skeleton(g.x, 2), 1);
    const auto r = alexander_reduce(g, c, g.x, 4);
    CHECK(r.holds);
    CHECK(r.lhs <= r.rhs + 1e-9);
    CHECK(r.z_norm <= 3 * g.K * norm(g.x));
    CHECK(r.lhs == doctest::Approx(std::sqrt(200.0)));
    CHECK_THROWS_AS(alexander_reduce(g, c, {49, 0, 0}, 4), Error);
  }
  SUBCASE("exact additivity") {
    const auto n = OracleRegistry::instance().make("norm", 2);
    g.oracle = &n;
    g.x = {6, 8, 0};
    const auto c = alexander_step1(g, {{0, 0, 0}, {3, 4, 0}, {6, 8, 0}}, 1);
    const auto r = alexander_reduce(g, c, g.x, 3);
    CHECK(r.lhs == doctest::Approx(0).epsilon(1e-12));
    CHECK(r.increment_gap == doctest::Approx(0).epsilon(1e-12));
    CHECK(r.holds);
  }
}

TEST_CASE("gap from skeleton") {
  auto unit = [](const Vec& x) { return greedy_unit_skeleton(x, 2); };
  const auto one = [](double) { return 1.0; };
  const auto sq = OracleRegistry::instance().make("sqrt", 2);
  const auto rep = gap_from_skeleton(sq, 0.5, one, 2, 1, 5, unit);
  REQUIRE(rep.levels.size() == 6);
  for (const auto& l : rep.levels) CHECK(l.sup_normalized <= 1.05);
  CHECK(rep.bound_constant <= 1.05);
  const auto js = nlohmann::json::parse(rep.to_json());
  CHECK(js["levels"].size() == 6);

  const auto nm = OracleRegistry::instance().make("norm", 2);
  for (const auto& l : gap_from_skeleton(nm, 0.5, one, 2, 1, 5, unit).levels) {
    CHECK(l.sup_gap == doctest::Approx(0).epsilon(1e-9));
    CHECK(l.slack == doctest::Approx(0).epsilon(1e-9));
  }

  const auto lg = OracleRegistry::instance().make("log", 2);
  const auto lr = gap_from_skeleton(lg, 0.5, one, 2, 1, 6, unit);
  // log grows slower than sqrt: the normalized slack shrinks.
  CHECK(lr.levels.back().slack_normalized < lr.levels[2].slack_normalized);

  CHECK_THROWS_AS(gap_from_skeleton(sq, 0.5, one, 2, 1, 2, [](const Vec&) { return std::vector<Vec>{}; }), Error);
}
