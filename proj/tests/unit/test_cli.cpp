#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rds/commands.hpp"
#include "rds/config.hpp"
#include "rds/error.hpp"

using namespace rds;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("rds_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const Json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

int run_tool(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(RDS_CIRCLE_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                          " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cmd(const std::string& sub, const Json& cfg, const fs::path& dir, const std::string& extra = "") {
  const auto p = write_config(dir, cfg);
  return run_tool(sub + " --config " + p.string() + " --out " + (dir / "out").string() + " " + extra, dir);
}

Json base() { return {{"schema_version", 1}, {"master_seed", 7}}; }

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Config, ParsingAndEcho) {
  Json j = base();
  j["families"] = Json::array({Json{{"name", "example3"}, {"epsilon", 0.1}, {"c", 0.2}}});
  j["window"] = {{"half_width", 100}};
  const auto c = parse_config(j);
  EXPECT_EQ(c.half_width, 100);
  const auto e = echo_config(c);
  EXPECT_EQ(e.at("conjugacy").at("n_max"), 100);
  EXPECT_EQ(e.at("conjugacy").at("n_h"), 20);
  EXPECT_EQ(e.at("conjugacy").at("interior"), 4);
  EXPECT_EQ(e.at("mc").at("n_bins"), 2048);
  EXPECT_FALSE(e.contains("threads"));
  EXPECT_FALSE(e.contains("out_dir"));
  EXPECT_NE(c.mc_seed(), c.window_seed());

  EXPECT_THROW(parse_config(Json{{"master_seed", 1}}), ConfigError);
  Json bad = base();
  bad["window"] = {{"half_width", 100}, {"oops", 1}};
  EXPECT_THROW(parse_config(bad), ConfigError);
  bad = base();
  bad["window"] = {{"half_width", "wide"}};
  EXPECT_THROW(parse_config(bad), ConfigError);
  bad = base();
  bad["extra"] = 1;
  EXPECT_THROW(parse_config(bad), ConfigError);
}

TEST(Config, ExitCodes) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
  EXPECT_EQ(exit_code_for(PreconditionError("x")), 2);
  EXPECT_EQ(exit_code_for(StructureError("x")), 3);
  EXPECT_EQ(exit_code_for(ConjugacyError("x")), 4);
  EXPECT_EQ(exit_code_for(NumericError("x")), 5);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 5);
}

TEST(Cli, VersionAndUsage) {
  const auto d = scratch_dir("version");
  EXPECT_EQ(run_tool("--version", d), 0);
  EXPECT_NE(slurp(d / "stdout.txt").find("rds_circle"), std::string::npos);
  EXPECT_EQ(run_tool("simulate", d), 2);
  EXPECT_EQ(run_tool("bogus", d), 2);
  EXPECT_EQ(run_tool("simulate --config " + (d / "missing.json").string(), d), 2);
}

TEST(Cli, SimulateFixedPoint) {
  const auto d = scratch_dir("sim_fixed");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "canonical"}, {"k", 1}, {"l", 0}}});
  c["simulate"] = {{"x0", 0.5}, {"steps", 20}};
  ASSERT_EQ(run_cmd("simulate", c, d), 0);
  const auto rows = read_csv(d / "out" / "orbit.csv");
  ASSERT_EQ(rows.size(), 20u);
  for (const auto& r : rows) EXPECT_NEAR(r[1], 0.5, 1e-15);
}

TEST(Cli, SimulateRotation) {
  const auto d = scratch_dir("sim_rot");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "rotation"}, {"offset", 0.25}, {"scale", 0.0}}});
  c["simulate"] = {{"x0", 0.0}, {"steps", 4}};
  ASSERT_EQ(run_cmd("simulate", c, d), 0);
  EXPECT_EQ(slurp(d / "out" / "orbit.csv"), "n,x\n0,0\n1,0.25\n2,0.5\n3,0.75\n");
  const auto j = Json::parse(slurp(d / "out" / "simulate.json"));
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_TRUE(j.contains("version"));
  EXPECT_TRUE(j.at("config").contains("derived_seeds"));
}

TEST(Cli, MissingFamilyIsConfigError) {
  const auto d = scratch_dir("sim_missing");
  EXPECT_EQ(run_cmd("simulate", base(), d), 2);
  EXPECT_NE(slurp(d / "stderr.txt").find("family"), std::string::npos);
}

TEST(Cli, StructureJson) {
  const auto d = scratch_dir("structure");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "example1"}, {"k", 2}, {"l", 1}, {"r", 0.05}}});
  ASSERT_EQ(run_cmd("structure", c, d), 0);
  const auto j = Json::parse(slurp(d / "out" / "structure.json"));
  EXPECT_EQ(j.at("structure").at("k"), 2);
  EXPECT_EQ(j.at("structure").at("l"), 1);
  EXPECT_TRUE(fs::exists(d / "out" / "histogram.csv"));

  c["families"] = Json::array({Json{{"name", "example3"}, {"epsilon", 0.15915494309189535}, {"c", 0.1}}});
  ASSERT_EQ(run_cmd("structure", c, d), 0);
  const auto k = Json::parse(slurp(d / "out" / "structure.json"));
  EXPECT_EQ(k.at("structure").at("whole_circle"), true);
  EXPECT_EQ(k.at("structure").at("symmetry_order"), 1);
}

TEST(Cli, ConjugacyReport) {
  const auto d = scratch_dir("conj");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "example3"}, {"epsilon", 0.15915494309189535}, {"c", 0.1}}});
  c["window"] = {{"half_width", 200}};
  c["conjugacy"] = {{"n_h", 40}, {"trend", {100, 200}}};
  ASSERT_EQ(run_cmd("conjugacy", c, d), 0) << slurp(d / "stderr.txt");
  const auto j = Json::parse(slurp(d / "out" / "conjugacy.json"));
  EXPECT_LT(j.at("report").at("residual_sup").get<double>(), 1e-2);
  EXPECT_EQ(j.at("config").at("conjugacy").at("n_h"), 40);
  const auto rows = read_csv(d / "out" / "nodes.csv");
  ASSERT_GT(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i - 1][0], rows[i][0]);
    EXPECT_LT(rows[i - 1][1], rows[i][1]);
  }
}

TEST(Cli, ConjugacyShortWindow) {
  const auto d = scratch_dir("conj_short");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "example1"}, {"k", 2}, {"l", 1}, {"r", 0.05}}});
  c["window"] = {{"half_width", 20}};
  c["conjugacy"] = {{"n_h", 40}, {"trend", Json::array()}};
  EXPECT_EQ(run_cmd("conjugacy", c, d), 4);
  EXPECT_NE(slurp(d / "stderr.txt").find("increase n_max"), std::string::npos);
}

TEST(Cli, Classify) {
  const auto d = scratch_dir("classify");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "example1"}, {"k", 1}, {"l", 0}, {"r", 0.05}},
                               Json{{"name", "example1"}, {"k", 1}, {"l", 0}, {"r", 0.3}, {"coordinate", 1}}});
  ASSERT_EQ(run_cmd("classify", c, d), 0);
  EXPECT_EQ(Json::parse(slurp(d / "out" / "verdict.json")).at("orientational"), "yes");
  EXPECT_NE(slurp(d / "stdout.txt").find("orientational: yes"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "out" / "verdict.txt"));

  c["families"] = Json::array({Json{{"name", "example2"}, {"k", 3}, {"l", 1}, {"r", 0.2}, {"sign", "+"}},
                               Json{{"name", "example2"}, {"k", 3}, {"l", 1}, {"r", 0.2}, {"sign", "-"}}});
  ASSERT_EQ(run_cmd("classify", c, d), 0);
  EXPECT_EQ(Json::parse(slurp(d / "out" / "verdict.json")).at("orientational"), "no");

  c["families"] = Json::array({Json{{"name", "example3"}, {"epsilon", 0.1}, {"c", 0.3}},
                               Json{{"name", "example3"}, {"epsilon", 0.1}, {"c", 0.3}}});
  ASSERT_EQ(run_cmd("classify", c, d), 0);
  EXPECT_EQ(Json::parse(slurp(d / "out" / "verdict.json")).at("orientational"), "yes");

  c["families"] = Json::array({Json{{"name", "example3"}, {"epsilon", 0.1}, {"c", 0.3}},
                               Json{{"name", "example1"}, {"k", 1}, {"l", 0}, {"r", 0.3}}});
  EXPECT_EQ(run_cmd("classify", c, d), 2);
}

TEST(Cli, ByteIdenticalOutputs) {
  const auto d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  Json c = base();
  c["families"] = Json::array({Json{{"name", "example1"}, {"k", 2}, {"l", 1}, {"r", 0.05}}});
  c["window"] = {{"half_width", 120}};
  c["conjugacy"] = {{"trend", {60}}};
  ASSERT_EQ(run_cmd("conjugacy", c, d1, "--threads 1"), 0);
  ASSERT_EQ(run_cmd("conjugacy", c, d2, "--threads 3"), 0);
  for (const char* f : {"conjugacy.json", "nodes.csv"})
    EXPECT_EQ(slurp(d1 / "out" / f), slurp(d2 / "out" / f)) << f;
  ASSERT_EQ(run_cmd("structure", c, d1), 0);
  ASSERT_EQ(run_cmd("structure", c, d2), 0);
  EXPECT_EQ(slurp(d1 / "out" / "structure.json"), slurp(d2 / "out" / "structure.json"));
  EXPECT_EQ(slurp(d1 / "out" / "histogram.csv"), slurp(d2 / "out" / "histogram.csv"));
  // --seed overrides master_seed
  ASSERT_EQ(run_cmd("structure", c, d2, "--seed 8"), 0);
  EXPECT_NE(slurp(d1 / "out" / "structure.json"), slurp(d2 / "out" / "structure.json"));
}
