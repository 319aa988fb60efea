#include "ghomog/experiments.hpp"

#include <algorithm>

#include "exp_internal.hpp"
#include "ghomog/config.hpp"

namespace ghomog {

namespace {

std::vector<ExperimentInfo> build_catalog() {
  return {
      {"field-check",
       "samples the field and checks the speed, divergence and Jacobian bounds",
       {{"trials", "integer", "4", "independent fields"},
        {"samples", "integer", "10000", "sample points per field"},
        {"box", "real", "8", "points drawn from [-box, box]^d"}}},
      {"percolation-tail",
       "tail of |cl(S)| for a fixed set S on an i.i.d. lattice",
       {{"trials", "integer", "10000", "lattices"},
        {"p", "real", "0.95", "open probability"},
        {"set_size", "integer", "40", "|S|"},
        {"set_shape", "text", "line", "line | random (connected set grown from the center)"},
        {"margin", "integer", "8", "window margin around S"},
        {"min_count", "integer", "10", "smallest tail count kept in the fit"}}},
      {"unicoherence",
       "random connected sets: inner and outer boundaries of every complement component are connected",
       {{"trials", "integer", "10000", "sets"},
        {"side", "integer", "8", "window side length"},
        {"max_size", "integer", "0", "largest set size; 0 = half the window"}}},
      {"detour",
       "detour skeletons between random points of one open cluster",
       {{"trials", "integer", "1000", "lattices"},
        {"p", "real", "0.95", "open probability"},
        {"radius", "integer", "12", "window Q_radius"}}},
      {"giant-cluster",
       "frequency of the giant-cluster event E_n",
       {{"trials", "integer", "1000", "lattices"},
        {"p", "real", "0.95", "open probability"},
        {"R", "integer", "20", "inner cube radius"},
        {"n", "integer", "25", "component size cutoff and cube margin"}}},
      {"rearrange",
       "prefix-bounded rearrangement of unit vectors",
       {{"trials", "integer", "1000", "instances"},
        {"dims", "reals", "2,3", "dimensions drawn uniformly"},
        {"n_max", "integer", "12", "vectors per instance drawn from 1..n_max"},
        {"exhaustive_max", "integer", "8", "exhaustive search for n <= this"},
        {"exact", "flag", "false", "rational arithmetic"}}},
      {"skeleton-gap",
       "doubling-induction gap bound for a synthetic subadditive oracle",
       {{"oracle", "text", "sqrt", "sqrt | log | norm"},
        {"nu", "real", "0.5", "growth exponent"},
        {"M", "real", "2", "doubling factor"},
        {"K", "real", "1", "base radius"},
        {"levels", "integer", "5", "doubling levels"}}},
      {"shape",
       "Hausdorff distance between rescaled reachable sets and the estimated limit shape",
       {{"trials", "integer", "30", "fields"},
        {"times", "reals", "25,50,100", "times t"},
        {"directions", "integer", "64", "direction grid size"},
        {"ref_trials", "integer", "8", "fields in the limit-shape estimate"},
        {"ref_radii", "reals", "32,64,128", "radii in the limit-shape estimate"}}},
      {"fluctuation",
       "std and bias of theta(0, R v) against R",
       {{"trials", "integer", "100", "fields"},
        {"radii", "reals", "16,32,64,128", "radii R"},
        {"direction", "reals", "1,0,0", "v"},
        {"ref_trials", "integer", "30", "fields in the theta_bar reference"},
        {"ref_radius", "real", "512", "radius of the theta_bar reference"}}},
      {"homog-error",
       "sup error between u^eps and the homogenized solution for u0(x) = p.x",
       {{"trials", "integer", "30", "fields"},
        {"eps", "reals", "0.0625,0.03125,0.015625", "decreasing scales"},
        {"times", "reals", "1,2,3,4", "sampled times (macroscopic, >= 1)"},
        {"p", "reals", "1,0,0", "slope of u0"},
        {"ref_trials", "integer", "8", "fields in the Hbar reference"},
        {"ref_scale", "real", "1024", "microscopic time of the Hbar reference"}}},
      {"continuity",
       "Hbar under amplitudes a(1 + 2^-n) against Hbar under a",
       {{"trials", "integer", "50", "fields (common across amplitudes)"},
        {"levels", "integer", "4", "n = 0..levels-1"},
        {"radius", "real", "32", "plug-in radius for theta_bar"},
        {"directions", "integer", "64", "direction grid size"},
        {"slopes", "integer", "8", "p directions"}}},
  };
}

std::string type_error(const std::string& kind, const ParamSpec& p, const std::string& v) {
  return kind + ".params." + p.name + ": '" + v + "' is not a valid " + p.type;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = build_catalog();
  return catalog;
}

const ExperimentInfo& experiment_info(const std::string& kind) {
  for (const auto& info : experiment_catalog())
    if (info.kind == kind) return info;
  throw Error(ErrorCode::Config, "experiment.kind: unknown kind '" + kind + "'");
}

ParamSet::ParamSet(const ExperimentInfo& info, const std::map<std::string, std::string>& given) : kind_(info.kind) {
  for (const auto& [k, v] : given) {
    const bool known =
        std::any_of(info.params.begin(), info.params.end(), [&](const ParamSpec& p) { return p.name == k; });
    if (!known) throw Error(ErrorCode::Config, "params." + k + ": unknown parameter for kind '" + kind_ + "'");
  }
  for (const auto& p : info.params) {
    auto it = given.find(p.name);
    std::string v = it == given.end() ? p.default_value : it->second;
    try {
      if (p.type == "real") v = format_double(parse_double(v, p.name));
      else if (p.type == "integer") v = std::to_string(parse_int(v, p.name));
      else if (p.type == "reals") v = join_doubles(parse_double_list(v, p.name));
      else if (p.type == "flag") v = parse_bool(v, p.name) ? "true" : "false";
    } catch (const Error&) {
      throw Error(ErrorCode::Config, type_error(kind_, p, v));
    }
    values_[p.name] = v;
  }
}

namespace {
const std::string& lookup(const std::map<std::string, std::string>& m, const std::string& name) {
  auto it = m.find(name);
  if (it == m.end()) throw Error(ErrorCode::Internal, "undeclared parameter '" + name + "'");
  return it->second;
}
}  // namespace

double ParamSet::real(const std::string& name) const { return parse_double(lookup(values_, name), name); }
long long ParamSet::integer(const std::string& name) const { return parse_int(lookup(values_, name), name); }
std::vector<double> ParamSet::reals(const std::string& name) const {
  return parse_double_list(lookup(values_, name), name);
}
const std::string& ParamSet::text(const std::string& name) const { return lookup(values_, name); }
bool ParamSet::flag(const std::string& name) const { return parse_bool(lookup(values_, name), name); }

double TrialResult::value(const std::string& parameter) const {
  for (const auto& r : rows)
    if (r.parameter == parameter) return r.value;
  throw Error(ErrorCode::Internal, "trial " + std::to_string(index) + " has no value '" + parameter + "'");
}

std::uint64_t reference_stream(std::uint64_t master_seed) { return hash_combine(master_seed, 0x5eedfee1ULL); }

std::unique_ptr<Experiment> make_experiment(const ExperimentSetup& setup) {
  using namespace detail;
  static const std::map<std::string, std::unique_ptr<Experiment> (*)(const ExperimentSetup&)> table = {
      {"field-check", make_field_check},   {"percolation-tail", make_percolation_tail},
      {"unicoherence", make_unicoherence}, {"detour", make_detour},
      {"giant-cluster", make_giant_cluster}, {"rearrange", make_rearrange},
      {"skeleton-gap", make_skeleton_gap}, {"shape", make_shape},
      {"fluctuation", make_fluctuation},   {"homog-error", make_homog_error},
      {"continuity", make_continuity},
  };
  experiment_info(setup.kind);
  auto it = table.find(setup.kind);
  if (it == table.end()) throw Error(ErrorCode::Internal, "no implementation for kind '" + setup.kind + "'");
  return it->second(setup);
}

namespace detail {

Vec parse_vec(const std::vector<double>& v, int dim, const std::string& what) {
  if (static_cast<int>(v.size()) < dim) throw Error(ErrorCode::Config, what + ": needs " + std::to_string(dim) + " components");
  Vec out{0, 0, 0};
  for (int i = 0; i < dim; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

std::vector<const TrialResult*> completed(const std::vector<TrialResult>& trials) {
  std::vector<const TrialResult*> out;
  for (const auto& t : trials)
    if (t.ok()) out.push_back(&t);
  return out;
}

std::vector<double> column(const std::vector<TrialResult>& trials, const std::string& parameter) {
  std::vector<double> out;
  for (const auto* t : completed(trials)) out.push_back(t->value(parameter));
  return out;
}

}  // namespace detail

}  // namespace ghomog
