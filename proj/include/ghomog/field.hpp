#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "ghomog/common.hpp"

namespace ghomog {

/// Law of a random divergence-free environment built from compactly supported
/// polynomial bumps (1 - |u|^2)^4 placed on a randomly shifted lattice.
///
/// `amplitude` is the guaranteed speed bound: sup |V| <= amplitude for every
/// seed. The C^{1,1} bound L follows from the bump profile (see bounds()).
struct FieldSpec {
  int dim = 2;
  double amplitude = 0.5;
  double bump_radius = 0.3;
  double lattice_pitch = 0.2;
  std::uint64_t seed = 0;

  /// Throws Error(InvalidArgument) naming the violated constraint.
  void validate() const;

  std::map<std::string, std::string> to_kv() const;
  static FieldSpec from_kv(const std::map<std::string, std::string>& kv);
};

struct FieldBounds {
  int max_overlap = 0;  // max number of bumps whose support contains a point
  double speed = 0;     // sup |V|
  double jacobian = 0;  // sup |DV| (Frobenius)
  double hessian = 0;   // sup |D^2 V| (Frobenius)
  double L = 0;         // max of the three: the C^{1,1} bound
};

FieldBounds compute_bounds(const FieldSpec& spec);

/// Immutable sampled environment. eval/jacobian are pure and thread-safe.
class Field {
 public:
  Field(const FieldSpec& spec, std::uint64_t seed);

  const FieldSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  int dim() const { return spec_.dim; }
  const Vec& shift() const { return shift_; }
  const FieldBounds& bounds() const { return bounds_; }
  double L() const { return bounds_.L; }
  /// Speed limit of controlled paths: 1 + sup|V|.
  double max_speed() const { return 1.0 + bounds_.speed; }
  bool is_zero() const { return spec_.amplitude == 0.0; }

  Vec eval(const Vec& x) const;
  Mat jacobian(const Vec& x) const;

  /// Stream function (d = 2, component 0) or vector potential (d = 3).
  Vec potential(const Vec& x) const;

  /// I.i.d. coefficient in (-1, 1), symmetric, keyed by (seed, lattice index, component).
  double coefficient(const std::array<long, 3>& k, int component) const;

 private:
  template <class Fn>
  void for_each_bump(const Vec& x, Fn&& fn) const;

  FieldSpec spec_;
  std::uint64_t seed_;
  Vec shift_{};
  FieldBounds bounds_;
  double coef_scale_ = 0;
};

Field build_field(const FieldSpec& spec, std::uint64_t seed);

/// Writes V sampled on an n^d grid of [lo, hi]^d as CSV (x,y[,z],vx,vy[,vz]).
void export_field_csv(const Field& field, double lo, double hi, int n, std::ostream& out);

}  // namespace ghomog
