#include "ghomog/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ghomog/config.hpp"

namespace ghomog {

namespace {

// sup over the unit ball of |grad b|, b(u) = (1 - |u|^2)^4; attained at |u|^2 = 1/7.
double profile_grad_sup() {
  const double rho = std::sqrt(1.0 / 7.0);
  const double q = 1.0 - rho * rho;
  return 8.0 * q * q * q * rho;
}

// Frobenius norms of D^2 b and D^3 b are radial; maximize on a fine radial grid
// and pad by 1% to stay an upper bound between samples.
double profile_hessian_sup(int d) {
  double best = 0;
  for (int i = 0; i <= 20000; ++i) {
    const double rho = i / 20000.0;
    const double q = 1 - rho * rho;
    const double a = -8 * q * q * q;
    const double b = a + 48 * q * q * rho * rho;
    best = std::max(best, std::sqrt((d - 1) * a * a + b * b));
  }
  return best * 1.01;
}

double profile_third_sup(int d) {
  double best = 0;
  for (int s = 0; s <= 20000; ++s) {
    const double rho = s / 20000.0;
    const double q = 1 - rho * rho;
    const double u[3] = {rho, 0, 0};
    double sum = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double t = 48 * q * q * (u[k] * (i == j) + u[i] * (j == k) + u[j] * (i == k)) -
                     192 * q * u[i] * u[j] * u[k];
          sum += t * t;
        }
    best = std::max(best, std::sqrt(sum));
  }
  return best * 1.01;
}

// Max number of lattice points of pitch s strictly within distance r of a point,
// scanning one lattice cell with a slightly enlarged radius.
int max_overlap(int d, double r, double s) {
  const int res = 32;
  const double pad = s / res * std::sqrt(static_cast<double>(d));
  const double rr = r + pad;
  const int span = static_cast<int>(std::ceil(rr / s)) + 1;
  int best = 0;
  for (int a = 0; a < res; ++a)
    for (int b = 0; b < res; ++b)
      for (int c = 0; c < (d == 3 ? res : 1); ++c) {
        const double x[3] = {(a + 0.5) * s / res, (b + 0.5) * s / res, d == 3 ? (c + 0.5) * s / res : 0};
        int count = 0;
        for (int i = -span; i <= span; ++i)
          for (int j = -span; j <= span; ++j)
            for (int k = (d == 3 ? -span : 0); k <= (d == 3 ? span : 0); ++k) {
              const double dx = x[0] - i * s, dy = x[1] - j * s, dz = x[2] - k * s;
              if (dx * dx + dy * dy + dz * dz < rr * rr) ++count;
            }
        best = std::max(best, count);
      }
  return best;
}

}  // namespace

void FieldSpec::validate() const {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "field.dimension must be 2 or 3");
  if (!(amplitude >= 0) || !std::isfinite(amplitude))
    throw Error(ErrorCode::InvalidArgument, "field.amplitude must be finite and >= 0");
  if (!(bump_radius > 0 && bump_radius <= 0.5))
    throw Error(ErrorCode::InvalidArgument, "field.bump_radius must lie in (0, 1/2]");
  if (!(lattice_pitch > 0 && lattice_pitch <= 0.5))
    throw Error(ErrorCode::InvalidArgument, "field.lattice_pitch must lie in (0, 1/2]");
  if (2 * (bump_radius + lattice_pitch) > 1 + 1e-12)
    throw Error(ErrorCode::InvalidArgument,
                "field: 2*(bump_radius + lattice_pitch) must be <= 1 (unit range of dependence)");
}

std::map<std::string, std::string> FieldSpec::to_kv() const {
  return {{"dimension", std::to_string(dim)},
          {"amplitude", format_double(amplitude)},
          {"bump_radius", format_double(bump_radius)},
          {"lattice_pitch", format_double(lattice_pitch)},
          {"seed", std::to_string(seed)}};
}

FieldSpec FieldSpec::from_kv(const std::map<std::string, std::string>& kv) {
  FieldSpec s;
  for (const auto& [key, value] : kv) {
    if (key == "dimension") s.dim = static_cast<int>(parse_int(value, "field.dimension"));
    else if (key == "amplitude") s.amplitude = parse_double(value, "field.amplitude");
    else if (key == "bump_radius") s.bump_radius = parse_double(value, "field.bump_radius");
    else if (key == "lattice_pitch") s.lattice_pitch = parse_double(value, "field.lattice_pitch");
    else if (key == "seed") s.seed = parse_uint(value, "field.seed");
    else throw Error(ErrorCode::Config, "field: unknown key '" + key + "'");
  }
  return s;
}

FieldBounds compute_bounds(const FieldSpec& spec) {
  spec.validate();
  FieldBounds b;
  const int d = spec.dim;
  const double r = spec.bump_radius;
  b.max_overlap = max_overlap(d, r, spec.lattice_pitch);
  // V = J grad(psi) in 2D, curl(A) in 3D; |curl| <= sqrt(2)|DA|_F and |DA|_F <= sqrt(3) max_m |grad A_m|.
  const double factor = d == 2 ? 1.0 : std::sqrt(6.0);
  const double g1 = profile_grad_sup();
  const double scale = spec.amplitude * r / (b.max_overlap * g1 * factor);
  b.speed = spec.amplitude;
  b.jacobian = factor * b.max_overlap * scale * profile_hessian_sup(d) / (r * r);
  b.hessian = factor * b.max_overlap * scale * profile_third_sup(d) / (r * r * r);
  b.L = std::max({b.speed, b.jacobian, b.hessian});
  return b;
}

Field::Field(const FieldSpec& spec, std::uint64_t seed) : spec_(spec), seed_(seed) {
  spec_.seed = seed;
  bounds_ = compute_bounds(spec_);
  const double factor = spec_.dim == 2 ? 1.0 : std::sqrt(6.0);
  coef_scale_ = spec_.amplitude * spec_.bump_radius / (bounds_.max_overlap * profile_grad_sup() * factor);
  const std::uint64_t key = hash_combine(seed_, 0x5348494654ULL);  // "SHIFT"
  for (int i = 0; i < spec_.dim; ++i)
    shift_[i] = spec_.lattice_pitch * unit_double(hash_combine(key, static_cast<std::uint64_t>(i)));
}

double Field::coefficient(const std::array<long, 3>& k, int component) const {
  std::uint64_t h = hash_combine(seed_, static_cast<std::uint64_t>(component) + 0x10);
  for (int i = 0; i < 3; ++i) h = hash_combine(h, static_cast<std::uint64_t>(k[i]));
  // (m + 1/2) 2^-52 - 1 for m in [0, 2^53): symmetric about 0 on (-1, 1).
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-52 - 1.0;
}

// Calls fn(u, q, k) for every bump with |u| < 1 where u = (x - center)/r, q = 1 - |u|^2.
template <class Fn>
void Field::for_each_bump(const Vec& x, Fn&& fn) const {
  const int d = spec_.dim;
  const double r = spec_.bump_radius, s = spec_.lattice_pitch;
  long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<long>(std::ceil((x[i] - shift_[i] - r) / s));
    hi[i] = static_cast<long>(std::floor((x[i] - shift_[i] + r) / s));
  }
  std::array<long, 3> k{0, 0, 0};
  for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
    for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
      for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
        Vec u{0, 0, 0};
        double rho2 = 0;
        for (int i = 0; i < d; ++i) {
          u[i] = (x[i] - (shift_[i] + s * static_cast<double>(k[i]))) / r;
          rho2 += u[i] * u[i];
        }
        if (rho2 >= 1.0) continue;
        fn(u, 1.0 - rho2, k);
      }
}

Vec Field::potential(const Vec& x) const {
  Vec out{0, 0, 0};
  if (is_zero()) return out;
  const int ncomp = spec_.dim == 2 ? 1 : 3;
  for_each_bump(x, [&](const Vec&, double q, const std::array<long, 3>& k) {
    const double b = q * q * q * q;
    for (int m = 0; m < ncomp; ++m) out[m] += coef_scale_ * coefficient(k, m) * b;
  });
  return out;
}

Vec Field::eval(const Vec& x) const {
  Vec v{0, 0, 0};
  if (is_zero()) return v;
  const double r = spec_.bump_radius;
  if (spec_.dim == 2) {
    double g0 = 0, g1 = 0;  // grad psi
    for_each_bump(x, [&](const Vec& u, double q, const std::array<long, 3>& k) {
      const double c = coef_scale_ * coefficient(k, 0) * (-8.0 * q * q * q) / r;
      g0 += c * u[0];
      g1 += c * u[1];
    });
    v = {g1, -g0, 0};
  } else {
    double g[3][3] = {};  // g[m][i] = d_i A_m
    for_each_bump(x, [&](const Vec& u, double q, const std::array<long, 3>& k) {
      const double w = coef_scale_ * (-8.0 * q * q * q) / r;
      for (int m = 0; m < 3; ++m) {
        const double c = w * coefficient(k, m);
        for (int i = 0; i < 3; ++i) g[m][i] += c * u[i];
      }
    });
    v = {g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
  }
  return v;
}

Mat Field::jacobian(const Vec& x) const {
  Mat J{};
  if (is_zero()) return J;
  const int d = spec_.dim;
  const double r2 = spec_.bump_radius * spec_.bump_radius;
  const int ncomp = d == 2 ? 1 : 3;
  double H[3][3][3] = {};  // H[m][i][j] = d_i d_j A_m
  for_each_bump(x, [&](const Vec& u, double q, const std::array<long, 3>& k) {
    const double a = -8.0 * q * q * q, b = 48.0 * q * q;
    for (int m = 0; m < ncomp; ++m) {
      const double c = coef_scale_ * coefficient(k, m) / r2;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) H[m][i][j] += c * ((i == j ? a : 0.0) + b * u[i] * u[j]);
    }
  });
  if (d == 2) {
    // V = (d_1 psi, -d_0 psi)
    J[0][0] = H[0][1][0];
    J[0][1] = H[0][1][1];
    J[1][0] = -H[0][0][0];
    J[1][1] = -H[0][0][1];
  } else {
    for (int j = 0; j < 3; ++j) {
      J[0][j] = H[2][1][j] - H[1][2][j];
      J[1][j] = H[0][2][j] - H[2][0][j];
      J[2][j] = H[1][0][j] - H[0][1][j];
    }
  }
  return J;
}

Field build_field(const FieldSpec& spec, std::uint64_t seed) { return Field(spec, seed); }

void export_field_csv(const Field& field, double lo, double hi, int n, std::ostream& out) {
  const int d = field.dim();
  out << (d == 2 ? "x,y,vx,vy\n" : "x,y,z,vx,vy,vz\n");
  const double step = n > 1 ? (hi - lo) / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < (d == 3 ? n : 1); ++k) {
        Vec x{lo + i * step, lo + j * step, d == 3 ? lo + k * step : 0.0};
        Vec v = field.eval(x);
        for (int c = 0; c < d; ++c) out << format_double(x[c]) << ',';
        for (int c = 0; c < d; ++c) out << format_double(v[c]) << (c + 1 < d ? ',' : '\n');
      }
}

}  // namespace ghomog
