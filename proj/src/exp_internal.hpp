#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ghomog/common.hpp"
#include "ghomog/config.hpp"
#include "ghomog/experiments.hpp"

namespace ghomog::detail {

// Counter-based stream for per-trial sampling.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return mix64(state_ += 0x9e3779b97f4a7c15ULL); }
  double uniform() { return unit_double(next()); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  long below(long n) { return static_cast<long>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

inline std::string key(const std::string& base, double x) { return base + "_" + format_double(x); }

Vec parse_vec(const std::vector<double>& v, int dim, const std::string& what);

// Ok trials only.
std::vector<const TrialResult*> completed(const std::vector<TrialResult>& trials);
// Values of one parameter over completed trials.
std::vector<double> column(const std::vector<TrialResult>& trials, const std::string& parameter);

std::unique_ptr<Experiment> make_field_check(const ExperimentSetup&);
std::unique_ptr<Experiment> make_percolation_tail(const ExperimentSetup&);
std::unique_ptr<Experiment> make_unicoherence(const ExperimentSetup&);
std::unique_ptr<Experiment> make_detour(const ExperimentSetup&);
std::unique_ptr<Experiment> make_giant_cluster(const ExperimentSetup&);
std::unique_ptr<Experiment> make_rearrange(const ExperimentSetup&);
std::unique_ptr<Experiment> make_skeleton_gap(const ExperimentSetup&);
std::unique_ptr<Experiment> make_shape(const ExperimentSetup&);
std::unique_ptr<Experiment> make_fluctuation(const ExperimentSetup&);
std::unique_ptr<Experiment> make_homog_error(const ExperimentSetup&);
std::unique_ptr<Experiment> make_continuity(const ExperimentSetup&);

}  // namespace ghomog::detail
