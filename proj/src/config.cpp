#include "rds/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rds/error.hpp"
#include "rds/noise.hpp"

namespace rds {

std::uint64_t RunConfig::mc_seed() const { return derive_seed(master_seed, 1); }
std::uint64_t RunConfig::window_seed() const { return derive_seed(master_seed, 2); }
std::uint64_t RunConfig::classifier_seed() const { return derive_seed(master_seed, 3); }

namespace {

void check_keys(const Json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(std::string("unknown key '") + k + "' in " + where);
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void require_positive(int v, const char* name) {
  if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

RunConfig parse_config(const Json& j) {
  check_keys(j, "config", {"schema_version", "master_seed", "families", "window", "simulate", "mc",
                           "conjugacy", "classifier", "threads", "out_dir"});
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != 1)
    throw ConfigError("config must declare \"schema_version\": 1");
  RunConfig c;
  read(j, "master_seed", c.master_seed);
  if (j.contains("families")) {
    if (!j.at("families").is_array()) throw ConfigError("families must be an array");
    for (const auto& f : j.at("families")) {
      if (!f.is_object()) throw ConfigError("each family descriptor must be an object");
      c.families.push_back(f);
    }
  }
  if (j.contains("window")) {
    const auto& w = j.at("window");
    check_keys(w, "window", {"half_width"});
    read(w, "half_width", c.half_width);
  }
  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    check_keys(s, "simulate", {"x0", "steps"});
    read(s, "x0", c.x0);
    read(s, "steps", c.steps);
  }
  if (j.contains("mc")) {
    const auto& m = j.at("mc");
    check_keys(m, "mc", {"n_bins", "n_samples", "n_burn", "n_chains", "gap_min", "n_alpha", "m_max",
                         "symmetry_tol", "antonov_windows", "antonov_n_max", "refine_boundaries"});
    read(m, "n_bins", c.mc.n_bins);
    read(m, "n_samples", c.mc.n_samples);
    read(m, "n_burn", c.mc.n_burn);
    read(m, "n_chains", c.mc.n_chains);
    read(m, "gap_min", c.mc.gap_min);
    read(m, "n_alpha", c.mc.n_alpha);
    read(m, "m_max", c.mc.m_max);
    read(m, "symmetry_tol", c.mc.symmetry_tol);
    read(m, "antonov_windows", c.mc.antonov_windows);
    read(m, "antonov_n_max", c.mc.antonov_n_max);
    read(m, "refine_boundaries", c.mc.refine_boundaries);
  }
  if (j.contains("conjugacy")) {
    const auto& k = j.at("conjugacy");
    check_keys(k, "conjugacy", {"n_max", "n_h", "interior", "grid", "trend"});
    read(k, "n_max", c.n_max);
    read(k, "n_h", c.n_h);
    read(k, "interior", c.interior);
    read(k, "grid", c.grid);
    read(k, "trend", c.trend);
  }
  if (j.contains("classifier")) {
    const auto& k = j.at("classifier");
    check_keys(k, "classifier", {"n_windows", "n_pull", "fit_tol", "strict", "min_windows",
                                 "rotation_samples", "lift_tol", "topological"});
    read(k, "n_windows", c.classifier.n_windows);
    read(k, "n_pull", c.classifier.n_pull);
    read(k, "fit_tol", c.classifier.fit_tol);
    read(k, "strict", c.classifier.strict);
    read(k, "min_windows", c.classifier.min_windows);
    read(k, "rotation_samples", c.classifier.rotation_samples);
    read(k, "lift_tol", c.classifier.lift_tol);
    read(k, "topological", c.topological);
  }
  read(j, "threads", c.threads);
  read(j, "out_dir", c.out_dir);

  require_positive(c.half_width, "window.half_width");
  require_positive(c.steps, "simulate.steps");
  require_positive(c.grid, "conjugacy.grid");
  require_positive(c.classifier.n_windows, "classifier.n_windows");
  require_positive(c.classifier.n_pull, "classifier.n_pull");
  if (c.n_max < 0 || c.n_h < 0 || c.interior < 0)
    throw ConfigError("conjugacy.n_max, n_h and interior must be non-negative");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  for (int n : c.trend) require_positive(n, "conjugacy.trend entries");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig resolved(const RunConfig& cfg) {
  RunConfig c = cfg;
  if (c.n_max == 0) c.n_max = c.half_width;
  if (c.n_h == 0) c.n_h = std::max(1, c.n_max / 5);
  if (c.interior == 0) c.interior = std::max(2, c.n_max / 25);
  return c;
}

Json echo_config(const RunConfig& cfg) {
  const RunConfig c = resolved(cfg);
  Json mc = mc_params_json(resolved_mc(c));
  return {{"schema_version", 1},
          {"master_seed", c.master_seed},
          {"families", c.families},
          {"window", {{"half_width", c.half_width}}},
          {"simulate", {{"x0", c.x0}, {"steps", c.steps}}},
          {"mc", mc},
          {"conjugacy",
           {{"n_max", c.n_max}, {"n_h", c.n_h}, {"interior", c.interior}, {"grid", c.grid}, {"trend", c.trend}}},
          {"classifier",
           {{"n_windows", c.classifier.n_windows},
            {"n_pull", c.classifier.n_pull},
            {"fit_tol", c.classifier.fit_tol},
            {"strict", c.classifier.strict},
            {"min_windows", c.classifier.min_windows},
            {"rotation_samples", c.classifier.rotation_samples},
            {"lift_tol", c.classifier.lift_tol},
            {"topological", c.topological},
            {"seed", c.classifier_seed()}}},
          {"derived_seeds", {{"mc", c.mc_seed()}, {"window", c.window_seed()}, {"classifier", c.classifier_seed()}}}};
}

McParams resolved_mc(const RunConfig& c) {
  McParams mc = c.mc;
  mc.seed = c.mc_seed();
  return mc;
}

ClassifierParams resolved_classifier(const RunConfig& c) {
  ClassifierParams p = c.classifier;
  p.seed = c.classifier_seed();
  p.mc = resolved_mc(c);
  return p;
}

}  // namespace rds
