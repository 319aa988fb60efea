#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghomog/field.hpp"
#include "ghomog/grid.hpp"

namespace ghomog {

/// One CSV record: (experiment, seed, parameter, value) minus the experiment name.
struct Row {
  std::uint64_t seed = 0;
  std::string parameter;
  double value = 0;
};

struct ParamSpec {
  std::string name;
  std::string type;  // real | integer | reals | text | flag
  std::string default_value;
  std::string help;
};

struct ExperimentInfo {
  std::string kind;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentInfo>& experiment_catalog();
/// Throws Error(Config) for an unknown kind.
const ExperimentInfo& experiment_info(const std::string& kind);

/// Experiment parameters with defaults applied; every value is checked
/// against its declared type on construction.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(const ExperimentInfo& info, const std::map<std::string, std::string>& given);

  double real(const std::string& name) const;
  long long integer(const std::string& name) const;
  std::vector<double> reals(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  bool flag(const std::string& name) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string kind_;
  std::map<std::string, std::string> values_;
};

struct ExperimentSetup {
  std::string kind;
  FieldSpec field;
  GridConfig grid;
  ParamSet params;
  std::uint64_t master_seed = 1;
};

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<Row> rows;
  std::string error;  // non-empty: trial failed and was skipped

  bool ok() const { return error.empty(); }
  /// Value of the first row named `parameter`; throws Error(Internal) if absent.
  double value(const std::string& parameter) const;
};

/// Runs job(0..n-1), possibly concurrently; returns once all are done.
using ParallelFor = std::function<void(int n, const std::function<void(int)>& job)>;

class Experiment {
 public:
  virtual ~Experiment() = default;
  virtual int trials() const = 0;
  /// Shared reference computations (own seed stream); rows are written before trial rows.
  virtual std::vector<Row> prepare(const ParallelFor&) { return {}; }
  /// Must be safe to call concurrently for distinct indices after prepare().
  virtual std::vector<Row> trial(int index, std::uint64_t seed) const = 0;
  /// Aggregates in trial-index order; failed trials are present with ok() == false.
  virtual nlohmann::json summarize(const std::vector<TrialResult>& trials) const = 0;
};

/// Seeds of reference runs: derive_seed(reference_stream(master), i).
std::uint64_t reference_stream(std::uint64_t master_seed);

/// Validates the blocks the kind depends on (Error(Config) naming the field) and builds the experiment.
std::unique_ptr<Experiment> make_experiment(const ExperimentSetup& setup);

}  // namespace ghomog
