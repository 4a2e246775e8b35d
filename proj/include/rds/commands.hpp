#pragma once

// Subcommands of the command-line tool. Each writes its artifacts into the
// output directory and returns the main JSON document it wrote.

#include <filesystem>
#include <string>

#include "rds/config.hpp"

namespace rds {

/// Version string embedded in every JSON output.
const char* tool_version();

/// Exit code for an exception escaping a subcommand.
int exit_code_for(const std::exception& e);

/// orbit.csv (n,x) and simulate.json.
Json cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
/// structure.json and histogram.csv.
Json cmd_structure(const RunConfig& cfg, const std::filesystem::path& out);
/// conjugacy.json and nodes.csv.
Json cmd_conjugacy(const RunConfig& cfg, const std::filesystem::path& out);
/// verdict.json and verdict.txt.
Json cmd_classify(const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace rds
