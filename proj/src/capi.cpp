#include "ghomog/ghomog.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "ghomog/field.hpp"
#include "ghomog/harness.hpp"
#include "ghomog/reachability.hpp"
#include "ghomog/subadditive.hpp"

struct ghomog_field {
  ghomog::Field field;
};
struct ghomog_passage {
  ghomog::PassageMap map;
};
struct ghomog_config {
  ghomog::ExperimentConfig config;
};
struct ghomog_run {
  ghomog::RunResult result;
  std::string summary;
};

namespace {

thread_local std::string last_error;

ghomog_status fail(ghomog_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class Fn>
ghomog_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return GHOMOG_OK;
  } catch (const ghomog::Error& e) {
    return fail(static_cast<ghomog_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GHOMOG_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GHOMOG_INTERNAL, e.what());
  } catch (...) {
    return fail(GHOMOG_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

ghomog::Vec vec3(const double* x) { return {x[0], x[1], x[2]}; }

#define GHOMOG_REQUIRE(cond, what) \
  if (!(cond)) return fail(GHOMOG_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* ghomog_version(void) { return "0.1.0"; }

const char* ghomog_last_error(void) { return last_error.c_str(); }

const char* ghomog_status_name(ghomog_status s) {
  switch (s) {
    case GHOMOG_OK: return "ok";
    case GHOMOG_INVALID_ARGUMENT: return "invalid-argument";
    case GHOMOG_CONFIG: return "config";
    case GHOMOG_WINDOW: return "window";
    case GHOMOG_DOMAIN: return "domain";
    case GHOMOG_BUDGET: return "budget";
    case GHOMOG_CERTIFICATE: return "certificate";
    case GHOMOG_IO: return "io";
    case GHOMOG_INTERNAL: return "internal";
  }
  return "unknown";
}

void ghomog_string_free(char* s) { std::free(s); }

ghomog_status ghomog_field_create(int dim, double amplitude, double bump_radius, double lattice_pitch, uint64_t seed,
                                  ghomog_field** out) {
  GHOMOG_REQUIRE(out, "out is null");
  return guard([&] {
    ghomog::FieldSpec spec;
    spec.dim = dim;
    spec.amplitude = amplitude;
    spec.bump_radius = bump_radius;
    spec.lattice_pitch = lattice_pitch;
    spec.seed = seed;
    spec.validate();
    *out = new ghomog_field{ghomog::Field(spec, seed)};
  });
}

void ghomog_field_destroy(ghomog_field* f) { delete f; }

ghomog_status ghomog_field_eval(const ghomog_field* f, const double* x, double* v) {
  GHOMOG_REQUIRE(f && x && v, "null argument");
  return guard([&] {
    const auto r = f->field.eval(vec3(x));
    for (int i = 0; i < 3; ++i) v[i] = r[i];
  });
}

ghomog_status ghomog_field_bounds(const ghomog_field* f, double* speed, double* L) {
  GHOMOG_REQUIRE(f, "null field");
  return guard([&] {
    if (speed) *speed = f->field.bounds().speed;
    if (L) *L = f->field.L();
  });
}

ghomog_status ghomog_passage_create(const ghomog_field* f, const double* x0, double half_width, double spacing,
                                    double time_step, double t_max, ghomog_passage** out) {
  GHOMOG_REQUIRE(f && x0 && out, "null argument");
  GHOMOG_REQUIRE(half_width > 0, "half_width must be > 0");
  return guard([&] {
    const ghomog::Vec src = vec3(x0);
    const auto cfg = ghomog::GridConfig::cell_centered(f->field.dim(), src, half_width, spacing, time_step);
    cfg.validate(f->field);
    ghomog::PropagateOptions opts;
    opts.check_window = false;
    if (t_max > 0) opts.t_max = t_max;
    *out = new ghomog_passage{ghomog::PassageMap(ghomog::solve_arrivals(f->field, src, cfg, opts))};
  });
}

void ghomog_passage_destroy(ghomog_passage* p) { delete p; }

ghomog_status ghomog_passage_at(const ghomog_passage* p, const double* y, double* theta) {
  GHOMOG_REQUIRE(p && y && theta, "null argument");
  return guard([&] { *theta = p->map.at(vec3(y)); });
}

ghomog_status ghomog_rearrange(const double* v, size_t n, const double* x, int dim, size_t* order,
                               double* max_deviation) {
  GHOMOG_REQUIRE(v && x && order, "null argument");
  return guard([&] {
    std::vector<ghomog::Vec> vs;
    for (size_t i = 0; i < n; ++i) vs.push_back(vec3(v + 3 * i));
    const auto r = ghomog::rearrange(vs, vec3(x), dim);
    for (size_t i = 0; i < n; ++i) order[i] = r.order[i];
    if (max_deviation) *max_deviation = r.max_deviation;
  });
}

ghomog_status ghomog_config_parse(const char* text, ghomog_config** out) {
  GHOMOG_REQUIRE(text && out, "null argument");
  return guard([&] { *out = new ghomog_config{ghomog::ExperimentConfig::parse(text)}; });
}

ghomog_status ghomog_config_load(const char* path, ghomog_config** out) {
  GHOMOG_REQUIRE(path && out, "null argument");
  return guard([&] { *out = new ghomog_config{ghomog::ExperimentConfig::load(path)}; });
}

void ghomog_config_destroy(ghomog_config* c) { delete c; }

ghomog_status ghomog_config_normalized(const ghomog_config* c, char** text) {
  GHOMOG_REQUIRE(c && text, "null argument");
  return guard([&] { *text = dup(c->config.normalized()); });
}

ghomog_status ghomog_config_hash(const ghomog_config* c, uint64_t* hash) {
  GHOMOG_REQUIRE(c && hash, "null argument");
  return guard([&] { *hash = c->config.hash(); });
}

ghomog_status ghomog_catalog(char** json) {
  GHOMOG_REQUIRE(json, "null argument");
  return guard([&] { *json = dup(ghomog::catalog_json().dump(2)); });
}

ghomog_status ghomog_run_experiment(const ghomog_config* c, const char* out_dir, int workers, ghomog_run** out) {
  GHOMOG_REQUIRE(c && out, "null argument");
  return guard([&] {
    ghomog::RunOptions opts;
    opts.out_dir = out_dir ? out_dir : "";
    opts.workers = workers;
    auto run = std::make_unique<ghomog_run>();
    run->result = ghomog::run_experiment(c->config, opts);
    run->summary = run->result.summary.dump(2);
    *out = run.release();
  });
}

void ghomog_run_destroy(ghomog_run* r) { delete r; }
const char* ghomog_run_csv_path(const ghomog_run* r) { return r ? r->result.csv_path.c_str() : ""; }
const char* ghomog_run_json_path(const ghomog_run* r) { return r ? r->result.json_path.c_str() : ""; }
const char* ghomog_run_summary(const ghomog_run* r) { return r ? r->summary.c_str() : ""; }
int ghomog_run_budget_exceeded(const ghomog_run* r) { return r && r->result.budget_exceeded ? 1 : 0; }
int ghomog_run_failed_trials(const ghomog_run* r) { return r ? r->result.failed_trials : 0; }
int ghomog_run_completed_trials(const ghomog_run* r) { return r ? r->result.completed_trials : 0; }

}  // extern "C"
