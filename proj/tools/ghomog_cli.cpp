// Command-line front end; talks to the library only through the C interface.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ghomog/ghomog.h"

namespace {

constexpr int kOk = 0, kConfigError = 1, kRuntimeError = 2;

int report(ghomog_status s, const char* what) {
  std::fprintf(stderr, "%s: %s (%s)\n", what, ghomog_last_error(), ghomog_status_name(s));
  return s == GHOMOG_CONFIG || s == GHOMOG_INVALID_ARGUMENT ? kConfigError : kRuntimeError;
}

ghomog_config* load(const std::string& path, int& code) {
  ghomog_config* cfg = nullptr;
  if (const auto s = ghomog_config_load(path.c_str(), &cfg); s != GHOMOG_OK) {
    code = report(s, "config error");
    return nullptr;
  }
  return cfg;
}

int cmd_validate(const std::string& path) {
  int code = kOk;
  ghomog_config* cfg = load(path, code);
  if (!cfg) return code;
  char* text = nullptr;
  const auto s = ghomog_config_normalized(cfg, &text);
  ghomog_config_destroy(cfg);
  if (s != GHOMOG_OK) return report(s, "config error");
  std::printf("ok\n%s", text);
  ghomog_string_free(text);
  return kOk;
}

int cmd_list() {
  char* json = nullptr;
  if (const auto s = ghomog_catalog(&json); s != GHOMOG_OK) return report(s, "catalog");
  std::printf("%s\n", json);
  ghomog_string_free(json);
  return kOk;
}

int cmd_run(const std::string& path, const std::string& out_dir, int workers, bool quiet) {
  int code = kOk;
  ghomog_config* cfg = load(path, code);
  if (!cfg) return code;
  ghomog_run* run = nullptr;
  const auto s = ghomog_run_experiment(cfg, out_dir.empty() ? nullptr : out_dir.c_str(), workers, &run);
  ghomog_config_destroy(cfg);
  if (s != GHOMOG_OK) return report(s, s == GHOMOG_CONFIG ? "config error" : "runtime error");
  if (!quiet) std::printf("%s\n", ghomog_run_summary(run));
  std::fprintf(stderr, "csv: %s\nsummary: %s\n", ghomog_run_csv_path(run), ghomog_run_json_path(run));
  code = kOk;
  if (ghomog_run_budget_exceeded(run)) {
    std::fprintf(stderr, "budget exceeded: partial results (%d trials completed)\n", ghomog_run_completed_trials(run));
    code = kRuntimeError;
  }
  if (ghomog_run_failed_trials(run) > 0)
    std::fprintf(stderr, "%d trial(s) failed; see trial_errors in the summary\n", ghomog_run_failed_trials(run));
  ghomog_run_destroy(run);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghomog experiment runner"};
  app.require_subcommand(1);
  std::string path, out_dir;
  int workers = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", path, "config file")->required();
  run->add_option("-o,--out", out_dir, "output directory (default: $GHOMOG_OUT or .)");
  run->add_option("-w,--workers", workers, "worker threads (default: from the config)");
  run->add_flag("-q,--quiet", quiet, "do not print the summary");

  auto* validate = app.add_subcommand("validate", "check a config file and print it with defaults applied");
  validate->add_option("config", path, "config file")->required();

  app.add_subcommand("list", "list experiment kinds and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (run->parsed()) return cmd_run(path, out_dir, workers, quiet);
  if (validate->parsed()) return cmd_validate(path);
  return cmd_list();
}
