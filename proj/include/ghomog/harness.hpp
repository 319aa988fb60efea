#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghomog/experiments.hpp"

namespace ghomog {

/// Plain-text run configuration:
///
///   [experiment]  kind, seed, workers, budget_seconds (0 = unlimited)
///   [field]       dimension, amplitude, bump_radius, lattice_pitch, seed
///   [grid]        spacing, time_step, stencil, half_width
///   [params]      kind-specific, see experiment_catalog()
struct ExperimentConfig {
  std::string kind;
  std::uint64_t master_seed = 1;
  int workers = 1;
  double budget_seconds = 0;
  FieldSpec field;
  GridConfig grid;
  std::map<std::string, std::string> params;

  /// Throws Error(Config) naming the offending section.key.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);

  /// Checks every block and the kind's parameters; throws Error(Config).
  ExperimentSetup setup() const;
  /// Canonical text with every default spelled out (validates first).
  std::string normalized() const;
  /// FNV-1a of the normalized text without the scheduling keys (workers, budget_seconds).
  std::uint64_t hash() const;
};

struct ValidationReport {
  bool ok = false;
  std::string message;     // "ok" or the named violation
  std::string normalized;  // empty unless ok
};

ValidationReport validate_config(std::string_view text);

struct RunOptions {
  std::string out_dir;  // empty: $GHOMOG_OUT, else "."
  int workers = 0;      // > 0 overrides the config
};

struct RunResult {
  std::string csv_path;
  std::string json_path;
  std::size_t rows = 0;
  int completed_trials = 0;
  int failed_trials = 0;
  bool budget_exceeded = false;
  nlohmann::json summary;
};

/// Runs every trial (seed_i = derive_seed(master, i)), writes
/// <out>/<kind>-<hash>.csv then the matching .json, each via a temporary file
/// and rename. CSV bytes do not depend on the worker count.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Output directory: `preferred` if non-empty, else $GHOMOG_OUT, else ".".
std::string output_directory(const std::string& preferred);

/// Kinds with parameter schemas, as JSON.
nlohmann::json catalog_json();

/// "experiment,seed,parameter,value" rows.
std::string render_csv(const std::string& kind, const std::vector<Row>& rows);

}  // namespace ghomog
