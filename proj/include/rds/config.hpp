#pragma once

// Run configuration for the command-line tool: parsing, validation and the
// fully-resolved echo embedded in every JSON output.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rds/classifier.hpp"
#include "rds/family.hpp"
#include "rds/structure.hpp"

namespace rds {

struct RunConfig {
  std::uint64_t master_seed = 1;
  std::vector<Json> families;
  int half_width = 200;  ///< N

  double x0 = 0.0;       ///< simulate: initial point
  int steps = 1000;      ///< simulate: rows written

  McParams mc;

  int n_max = 0;         ///< conjugacy window half-width; 0 = N
  int n_h = 0;           ///< 0 = n_max / 5
  int interior = 0;      ///< 0 = max(2, n_max / 25)
  int grid = 512;
  std::vector<int> trend = {100, 200, 400};

  ClassifierParams classifier;
  bool topological = true;  ///< classify: also run the mirrored test

  // Execution settings; they never change results and are not echoed.
  int threads = 0;
  std::string out_dir = "out";

  /// Seeds derived from master_seed for each stochastic stage.
  std::uint64_t mc_seed() const;
  std::uint64_t window_seed() const;
  std::uint64_t classifier_seed() const;
};

/// Parses a configuration object. Unknown keys, wrong types and a missing or
/// unsupported schema_version raise ConfigError.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Copy with the automatic conjugacy sizes (n_max, n_h, interior) filled in.
RunConfig resolved(const RunConfig& cfg);

/// Every result-affecting field, defaults and automatic sizes resolved.
Json echo_config(const RunConfig& cfg);

/// Classifier parameters with the derived seeds filled in.
ClassifierParams resolved_classifier(const RunConfig& cfg);
McParams resolved_mc(const RunConfig& cfg);

}  // namespace rds
