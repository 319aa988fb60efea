#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "ghomog/field.hpp"
#include "ghomog/stats.hpp"

using namespace ghomog;

namespace {
FieldSpec spec2(double a = 0.5) {
  FieldSpec s;
  s.dim = 2;
  s.amplitude = a;
  return s;
}
Vec random_point(std::uint64_t k, int d, double box) {
  Vec x{0, 0, 0};
  for (int i = 0; i < d; ++i) x[i] = box * (2 * unit_double(mix64(k * 3 + i)) - 1);
  return x;
}
}  // namespace

TEST_CASE("zero amplitude gives the zero field") {
  for (int d : {2, 3}) {
    FieldSpec s = spec2(0);
    s.dim = d;
    const Field f(s, 11);
    for (std::uint64_t k = 0; k < 200; ++k) {
      const Vec x = random_point(k, d, 5);
      CHECK(norm(f.eval(x)) == 0.0);
      const Mat J = f.jacobian(x);
      for (auto& row : J)
        for (double v : row) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("same spec and seed evaluate bit-identically") {
  const Field a(spec2(), 99), b(spec2(), 99);
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Vec x = random_point(k, 2, 10);
    const Vec va = a.eval(x), vb = b.eval(x);
    CHECK(std::memcmp(&va, &vb, sizeof va) == 0);
  }
  const Field c(spec2(), 100);
  CHECK(norm(a.eval({0.3, 0.4, 0}) - c.eval({0.3, 0.4, 0})) > 0);
}

TEST_CASE("spec validation") {
  FieldSpec s = spec2();
  s.bump_radius = 0.4;
  s.lattice_pitch = 0.2;
  CHECK_THROWS_AS(s.validate(), Error);
  s = spec2();
  s.dim = 4;
  CHECK_THROWS_AS(build_field(s, 1), Error);
  s = spec2();
  s.amplitude = -1;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_NOTHROW(spec2().validate());
}

TEST_CASE("speed bound holds on samples, divergence vanishes, jacobian matches finite differences") {
  for (int d : {2, 3}) {
    FieldSpec s = spec2(0.7);
    s.dim = d;
    const Field f(s, 5);
    const double h = 1e-3;
    double worst_fd = 0;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      const Vec x = random_point(k + 17, d, 6);
      const double v = norm(f.eval(x));
      REQUIRE(v <= f.L());
      REQUIRE(v <= s.amplitude + 1e-12);
      if (k % 10) continue;
      const Mat J = f.jacobian(x);
      double tr = 0;
      for (int i = 0; i < d; ++i) tr += J[i][i];
      CHECK(std::abs(tr) < 1e-9);
      double fd_div = 0;
      for (int j = 0; j < d; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec col = (1 / (2 * h)) * (f.eval(xp) - f.eval(xm));
        fd_div += col[j];
        for (int i = 0; i < d; ++i) worst_fd = std::max(worst_fd, std::abs(col[i] - J[i][j]));
      }
      CHECK(std::abs(fd_div) < 1e-6 * std::max(1.0, f.bounds().hessian));
    }
    CHECK(worst_fd < f.bounds().hessian * h * h);
  }
}

TEST_CASE("values more than 1 apart are uncorrelated; mean zero") {
  const FieldSpec s = spec2();
  const Vec x{0.1, 0.2, 0}, y{1.35, 0.2, 0};
  std::vector<double> prod, v0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Field f(s, seed);
    const Vec a = f.eval(x), b = f.eval(y);
    prod.push_back(dot(a, b));
    v0.push_back(a[0]);
  }
  CHECK(std::abs(mean(prod)) < 4 * std_error(prod));
  CHECK(std::abs(mean(v0)) < 4 * std_error(v0));
  // Nearby points are correlated, so the test has power.
  std::vector<double> near;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const Field f(s, seed);
    near.push_back(dot(f.eval(x), f.eval(x + Vec{0.02, 0, 0})));
  }
  CHECK(mean(near) > 4 * std_error(near));
}

TEST_CASE("kv round trip and CSV export") {
  FieldSpec s = spec2(0.25);
  s.dim = 3;
  s.seed = 42;
  const FieldSpec t = FieldSpec::from_kv(s.to_kv());
  CHECK(t.dim == 3);
  CHECK(t.amplitude == 0.25);
  CHECK(t.seed == 42);
  CHECK(t.to_kv() == s.to_kv());
  CHECK_THROWS_AS(FieldSpec::from_kv({{"colour", "red"}}), Error);

  std::ostringstream out;
  export_field_csv(Field(spec2(), 3), -1, 1, 5, out);
  const std::string csv = out.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
}
