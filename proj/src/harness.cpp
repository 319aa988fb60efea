#include "ghomog/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ghomog/config.hpp"

namespace ghomog {

namespace {

using Clock = std::chrono::steady_clock;

const std::map<std::string, std::string>& section_or_empty(const KvDocument& doc, const std::string& name) {
  static const std::map<std::string, std::string> empty;
  const auto* s = doc.section(name);
  return s ? *s : empty;
}

// Rethrows any failure as a config error.
template <class Fn>
auto as_config(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    throw Error(ErrorCode::Config, e.what());
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out << body;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

KvDocument render_doc(const ExperimentConfig& c, const ParamSet& params, bool scheduling) {
  KvDocument doc;
  doc.section_order = {"experiment", "field", "grid", "params"};
  auto& e = doc.sections["experiment"];
  e["kind"] = c.kind;
  e["seed"] = std::to_string(c.master_seed);
  if (scheduling) {
    e["workers"] = std::to_string(c.workers);
    e["budget_seconds"] = format_double(c.budget_seconds);
  }
  doc.sections["field"] = c.field.to_kv();
  auto& g = doc.sections["grid"];
  g["spacing"] = format_double(c.grid.h);
  g["time_step"] = format_double(c.grid.dt);
  g["stencil"] = std::to_string(c.grid.stencil);
  g["half_width"] = format_double(c.grid.hi[0]);
  doc.sections["params"] = params.values();
  return doc;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  return as_config([&] {
    const KvDocument doc = KvDocument::parse(text);
    for (const auto& name : doc.section_order)
      if (name != "experiment" && name != "field" && name != "grid" && name != "params")
        throw Error(ErrorCode::Config, "unknown section [" + name + "]");
    ExperimentConfig c;
    const auto& e = section_or_empty(doc, "experiment");
    for (const auto& [k, v] : e) {
      if (k == "kind") c.kind = v;
      else if (k == "seed") c.master_seed = parse_uint(v, "experiment.seed");
      else if (k == "workers") c.workers = static_cast<int>(parse_int(v, "experiment.workers"));
      else if (k == "budget_seconds") c.budget_seconds = parse_double(v, "experiment.budget_seconds");
      else throw Error(ErrorCode::Config, "experiment." + k + ": unknown key");
    }
    if (c.kind.empty()) throw Error(ErrorCode::Config, "experiment.kind: missing experiment kind");
    c.field = FieldSpec::from_kv(section_or_empty(doc, "field"));
    double half_width = 16;
    for (const auto& [k, v] : section_or_empty(doc, "grid")) {
      if (k == "spacing") c.grid.h = parse_double(v, "grid.spacing");
      else if (k == "time_step") c.grid.dt = parse_double(v, "grid.time_step");
      else if (k == "stencil") c.grid.stencil = static_cast<int>(parse_int(v, "grid.stencil"));
      else if (k == "half_width") half_width = parse_double(v, "grid.half_width");
      else throw Error(ErrorCode::Config, "grid." + k + ": unknown key");
    }
    if (!(half_width > 0)) throw Error(ErrorCode::Config, "grid.half_width: must be > 0");
    const GridConfig win = GridConfig::centered(c.field.dim, half_width, c.grid.h, c.grid.dt);
    c.grid.lo = win.lo;
    c.grid.hi = win.hi;
    c.params = section_or_empty(doc, "params");
    return c;
  });
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ExperimentSetup ExperimentConfig::setup() const {
  return as_config([&] {
    if (kind.empty()) throw Error(ErrorCode::Config, "experiment.kind: missing experiment kind");
    const ExperimentInfo& info = experiment_info(kind);
    if (workers < 1) throw Error(ErrorCode::Config, "experiment.workers: must be >= 1");
    if (!(budget_seconds >= 0)) throw Error(ErrorCode::Config, "experiment.budget_seconds: must be >= 0");
    field.validate();
    grid.validate(Field(field, field.seed));
    ExperimentSetup s;
    s.kind = kind;
    s.field = field;
    s.grid = grid;
    s.params = ParamSet(info, params);
    s.master_seed = master_seed;
    make_experiment(s);  // kind-specific checks
    return s;
  });
}

std::string ExperimentConfig::normalized() const { return render_doc(*this, setup().params, true).render(); }

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(render_doc(*this, setup().params, false).render()); }

ValidationReport validate_config(std::string_view text) {
  ValidationReport r;
  try {
    r.normalized = ExperimentConfig::parse(text).normalized();
    r.ok = true;
    r.message = "ok";
  } catch (const std::exception& e) {
    r.normalized.clear();
    r.message = e.what();
  }
  return r;
}

std::string output_directory(const std::string& preferred) {
  if (!preferred.empty()) return preferred;
  if (const char* env = std::getenv("GHOMOG_OUT"); env && *env) return env;
  return ".";
}

nlohmann::json catalog_json() {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& info : experiment_catalog()) {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : info.params)
      params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"help", p.help}});
    out.push_back({{"kind", info.kind}, {"summary", info.summary}, {"params", params}});
  }
  return out;
}

std::string render_csv(const std::string& kind, const std::vector<Row>& rows) {
  std::string out = "experiment,seed,parameter,value\n";
  for (const auto& r : rows) {
    out += kind;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.parameter;
    out += ',';
    out += format_double(r.value);
    out += '\n';
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentSetup setup = config.setup();
  const std::uint64_t hash = config.hash();
  auto exp = make_experiment(setup);
  const int workers = std::max(1, options.workers > 0 ? options.workers : config.workers);
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  // Dynamic work queue; results land in index-ordered slots.
  ParallelFor pfor = [workers](int n, const std::function<void(int)>& job) {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex m;
    auto worker = [&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!error) error = std::current_exception();
        }
      }
    };
    const int k = std::min(workers, std::max(n, 1));
    std::vector<std::thread> pool;
    for (int w = 1; w < k; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  };

  std::vector<Row> rows = exp->prepare(pfor);
  const int n = exp->trials();
  std::vector<TrialResult> results(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> ran(static_cast<std::size_t>(n), 0);
  std::atomic<bool> over{false};
  pfor(n, [&](int i) {
    auto& r = results[static_cast<std::size_t>(i)];
    r.index = i;
    r.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(i));
    if (config.budget_seconds > 0 && elapsed() > config.budget_seconds) {
      over = true;
      return;
    }
    try {
      r.rows = exp->trial(i, r.seed);
    } catch (const std::exception& e) {
      r.error = e.what();
      r.rows = {{r.seed, "trial_failed", 1}};
    }
    ran[static_cast<std::size_t>(i)] = 1;
  });

  RunResult out;
  std::vector<TrialResult> done;
  nlohmann::json failures = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    if (!ran[static_cast<std::size_t>(i)]) continue;
    auto& r = results[static_cast<std::size_t>(i)];
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    if (r.ok()) ++out.completed_trials;
    else {
      ++out.failed_trials;
      failures.push_back({{"index", i}, {"seed", r.seed}, {"message", r.error}});
    }
    done.push_back(std::move(r));
  }
  out.budget_exceeded = over;
  out.rows = rows.size();

  nlohmann::json s;
  s["experiment"] = config.kind;
  s["config_hash"] = hex64(hash);
  s["master_seed"] = config.master_seed;
  s["seed_rule"] = "seed_i = derive_seed(master_seed, i)";
  s["trials_requested"] = n;
  s["trials_completed"] = out.completed_trials;
  s["trials_failed"] = out.failed_trials;
  s["trial_errors"] = failures;
  s["budget_seconds"] = config.budget_seconds;
  s["budget_exceeded"] = out.budget_exceeded;
  s["partial"] = out.budget_exceeded;
  s["workers"] = workers;
  s["tolerances"] = {{"spacing", config.grid.h},
                     {"time_step", config.grid.dt},
                     {"stencil", config.grid.stencil},
                     {"cfl_ratio", config.grid.cfl_ratio(1 + config.field.amplitude)}};
  s["results"] = exp->summarize(done);
  s["elapsed_seconds"] = elapsed();
  out.summary = s;

  const std::filesystem::path dir = output_directory(options.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  const std::string stem = config.kind + "-" + hex64(hash);
  const auto csv = dir / (stem + ".csv");
  const auto json = dir / (stem + ".json");
  write_atomic(csv, render_csv(config.kind, rows));
  write_atomic(json, s.dump(2) + "\n");  // summary last
  out.csv_path = csv.string();
  out.json_path = json.string();
  return out;
}

}  // namespace ghomog
