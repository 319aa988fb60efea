#pragma once

#include <iosfwd>
#include <vector>

#include "ghomog/percolation.hpp"

namespace ghomog {

/// Waypoint chain between two points of one open cluster's solidification.
struct SkeletonPath {
  std::vector<Vec> waypoints;
  std::vector<int> step_case;               // case (1, 2, 3) that produced each step
  std::vector<std::int32_t> detour_components;  // complement component per case-3 detour
  bool revisited = false;                   // a case-3 component was met twice
  std::size_t fallbacks = 0;                // detours that needed the progress fallback
  std::size_t cl_A = 0;                     // |cl(A)|, A = sites whose cube meets [x, y]
  double count_bound = 0;                   // 2^d (1 + |x-y|) + |cl(A)| + (3^d + 2)|cl(A)|

  std::size_t steps() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
  double max_step() const;
  void write_csv(std::ostream& out) const;
};

/// Site whose unit cube contains x (nearest integer point).
Site site_of(const Vec& x, int dim);

/// Walks from x toward y in steps of length sqrt d while the landing cube stays
/// in the common open cluster C; when blocked, detours along the outer boundary of
/// the blocking component F of window \ C to the site of A n dF+ that maximizes
/// p.(y - x) (ties: lexicographically smallest), then rejoins [x, y] at the last
/// point of that site's cube. Throws Error(Domain) if x, y are not in one open cluster.
SkeletonPath detour_skeleton(const SiteLattice& lattice, const Vec& x, const Vec& y);

}  // namespace ghomog
