#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ghomog/common.hpp"

namespace ghomog {

class Field;

using Site = std::array<long, 3>;

/// Finite box of integer sites {lo_i .. lo_i + n_i - 1} with l-infinity adjacency
/// (3^d - 1 neighbors per site).
class LatticeWindow {
 public:
  LatticeWindow() = default;
  LatticeWindow(int dim, const Site& lo, const Site& extent);
  /// Q_R = [-R, R]^d, i.e. side 2R with 2R + 1 sites per axis.
  static LatticeWindow cube(int dim, long R);

  int dim() const { return dim_; }
  const Site& lo() const { return lo_; }
  const Site& extent() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0] * n_[1] * n_[2]); }

  bool contains(const Site& s) const;
  std::size_t index(const Site& s) const;
  Site site(std::size_t idx) const;

  /// Calls fn(neighbor_index) for every in-window neighbor.
  template <class Fn>
  void for_each_neighbor(std::size_t idx, Fn&& fn) const {
    const Site s = site(idx);
    const long zr = dim_ == 3 ? 1 : 0;
    for (long a = -1; a <= 1; ++a)
      for (long b = -1; b <= 1; ++b)
        for (long c = -zr; c <= zr; ++c) {
          if (!a && !b && !c) continue;
          const Site t{s[0] + a, s[1] + b, s[2] + c};
          if (contains(t)) fn(index(t));
        }
  }

 private:
  int dim_ = 2;
  Site lo_{0, 0, 0};
  Site n_{1, 1, 1};
};

/// Good (open) / bad (closed) site configuration on a window.
struct SiteLattice {
  LatticeWindow window;
  std::vector<std::uint8_t> open;  // 1 = open

  bool is_open(const Site& s) const { return open[window.index(s)] != 0; }
  double open_fraction() const;

  /// One character per site ('.' open, '#' closed); rows along axis 1, slices along axis 2.
  void write_text(std::ostream& out) const;
  static SiteLattice read_text(std::istream& in);
};

/// Bernoulli(p) site percolation on Q_R, keyed by (seed, site) so overlapping
/// windows agree.
SiteLattice iid_lattice(int dim, long R, double p, std::uint64_t seed);

struct ClassifyConfig {
  double h = 0.25;
  double dt = 0.05;
  double sample_spacing = 0.5;  // grid spacing of the sampled ball B(v, sqrt d)
  int threads = 1;
};

/// Site v is open iff theta(x, y) <= threshold for all sampled x, y in B(v, sqrt d).
SiteLattice classify_sites(const Field& field, long R, double threshold, const ClassifyConfig& cfg);

/// max over sampled pairs in B(v, sqrt d) of theta(x, y); +inf if some pair needs
/// more than `cap` time.
double site_passage_diameter(const Field& field, const Site& v, double cap, const ClassifyConfig& cfg);

/// Maximal connected components of constant state.
struct ClusterDecomposition {
  std::vector<std::int32_t> cluster_of;  // site index -> cluster id
  std::vector<std::size_t> size;
  std::vector<std::uint8_t> open;
  /// Sites of cluster `id`, ascending.
  std::vector<std::size_t> members(std::int32_t id) const;
};

/// Ids are assigned in order of each cluster's lowest site index.
ClusterDecomposition clusters(const SiteLattice& lattice);

/// Connected components (ids from 0, -1 outside) of the sites with mask[i] != 0.
std::vector<std::int32_t> components(const LatticeWindow& window, const std::vector<std::uint8_t>& mask,
                                     std::size_t* count = nullptr);

/// Closed sites joined to S by closed paths (closed sites of S included).
std::vector<std::size_t> cl_of(const SiteLattice& lattice, const std::vector<std::size_t>& S);

struct Boundaries {
  std::vector<std::size_t> inner;  // sites of E adjacent to window \ E
  std::vector<std::size_t> outer;  // sites of window \ E adjacent to E
};

Boundaries boundaries(const LatticeWindow& window, const std::vector<std::size_t>& E);

bool is_connected(const LatticeWindow& window, const std::vector<std::size_t>& sites);

struct UnicoherenceReport {
  bool pass = true;
  std::size_t components = 0;  // of window \ C
  std::string witness;         // first failing component, if any
};

/// For every component D of window \ C, checks that the inner and outer
/// boundaries of D are connected. Throws Error(Domain) if C is not connected.
UnicoherenceReport check_unicoherence(const LatticeWindow& window, const std::vector<std::size_t>& C);

/// Random connected set grown from the window center by uniform frontier picks.
std::vector<std::size_t> random_connected_set(const LatticeWindow& window, std::size_t size, std::uint64_t seed);

/// E_n: the largest open cluster C of Q_{R+n} (ties: lowest id) leaves only
/// complement components of <= n sites among those meeting Q_R.
bool giant_cluster_event(const SiteLattice& lattice, long R, long n);

}  // namespace ghomog
