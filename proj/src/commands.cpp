#include "rds/commands.hpp"

#include <fstream>
#include <sstream>

#include "rds/conjugacy.hpp"
#include "rds/error.hpp"
#include "rds/io.hpp"

#ifndef RDS_VERSION
#define RDS_VERSION "0.0.0"
#endif

namespace rds {

const char* tool_version() { return "rds_circle " RDS_VERSION; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e))
    return 2;
  if (dynamic_cast<const StructureError*>(&e)) return 3;
  if (dynamic_cast<const ConjugacyError*>(&e)) return 4;
  return 5;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << text;
}

Json envelope(const RunConfig& cfg, const char* command) {
  return {{"schema_version", 1}, {"version", tool_version()}, {"command", command}, {"config", echo_config(cfg)}};
}

RandomHomeoFamily family_at(const RunConfig& cfg, std::size_t i) {
  if (cfg.families.size() <= i)
    throw ConfigError("config needs at least " + std::to_string(i + 1) + " family descriptor(s)");
  return family_from_descriptor(cfg.families[i]);
}

}  // namespace

Json cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
  const auto fam = family_at(cfg, 0);
  const auto window = NoiseWindow::generate(fam.noise(), cfg.window_seed(), 0, cfg.steps);
  std::ostringstream csv;
  csv << "n,x\n";
  CirclePoint x(cfg.x0);
  for (int n = 0; n < cfg.steps; ++n) {
    csv << n << ',' << fmt17(x.value()) << '\n';
    x = fam.eval(window.at(n), x);
  }
  write_file(out / "orbit.csv", csv.str());
  Json j = envelope(cfg, "simulate");
  j["rows"] = cfg.steps;
  j["final"] = x.value();
  write_file(out / "simulate.json", dump_json(j));
  return j;
}

Json cmd_structure(const RunConfig& cfg, const std::filesystem::path& out) {
  const auto fam = family_at(cfg, 0);
  const McParams mc = resolved_mc(cfg);
  const auto s = estimate_minimal_structure(fam, mc);
  const auto hist = estimate_stationary_histogram(fam, mc.seed, mc.n_burn, mc.n_samples, mc.n_bins, mc.exec,
                                                  mc.n_chains);
  std::ostringstream csv;
  write_histogram_csv(csv, hist);
  write_file(out / "histogram.csv", csv.str());
  Json j = envelope(cfg, "structure");
  j["structure"] = s.to_json();
  write_file(out / "structure.json", dump_json(j));
  return j;
}

Json cmd_conjugacy(const RunConfig& raw, const std::filesystem::path& out) {
  const RunConfig cfg = resolved(raw);
  const auto fam = family_at(cfg, 0);
  const auto s = estimate_minimal_structure(fam, resolved_mc(cfg));
  const auto window = NoiseWindow::generate(fam.noise(), cfg.window_seed(), cfg.n_max);
  ConjugacyParams p;
  p.n_h = cfg.n_h;
  p.interior = cfg.interior;
  const auto b = build_conjugacy(fam, s, window, p);
  const auto target = canonical(b.k, b.l);

  ConjugacyReport rep;
  rep.k = b.k;
  rep.l = b.l;
  rep.seed = cfg.window_seed();
  rep.half_width = cfg.n_max;
  rep.n_h = cfg.n_h;
  rep.node_count = b.h0.size();
  rep.residual_sup = conjugation_residual(fam, target, window, b.h0, b.h1, cfg.grid);

  Json trend_notes = Json::array();
  ConjugacyParams trend_params;
  if (b.anchors.contractive_case) trend_params.anchors.epsilons = {b.anchors.epsilon_u, b.anchors.epsilon_v};
  for (int n : cfg.trend) {
    try {
      const auto w = NoiseWindow::generate(fam.noise(), cfg.window_seed(), n);
      const auto bt = build_conjugacy(fam, s, w, trend_params);
      rep.residual_trend.emplace_back(n, conjugation_residual(fam, target, w, bt.h0, bt.h1, cfg.grid));
    } catch (const ConjugacyError& e) {
      trend_notes.push_back("half-width " + std::to_string(n) + ": " + e.what());
    }
  }

  std::ostringstream csv;
  write_nodes_csv(csv, b.h0);
  write_file(out / "nodes.csv", csv.str());
  Json j = envelope(raw, "conjugacy");
  j["structure"] = s.to_json();
  j["report"] = rep.to_json();
  j["report"]["interior"] = cfg.interior;
  j["report"]["trend_notes"] = trend_notes;
  write_file(out / "conjugacy.json", dump_json(j));
  return j;
}

Json cmd_classify(const RunConfig& cfg, const std::filesystem::path& out) {
  const auto f = family_at(cfg, 0);
  const auto g = family_at(cfg, 1);
  const auto params = resolved_classifier(cfg);
  const Verdict v = cfg.topological ? classify_topological(f, g, params) : classify_orientational(f, g, params);
  Json j = envelope(cfg, "classify");
  j["verdict"] = v.to_json();
  j["orientational"] = to_string(v.orientational);
  j["topological"] = to_string(v.topological);
  write_file(out / "verdict.json", dump_json(j));
  write_file(out / "verdict.txt", v.summary());
  return j;
}

}  // namespace rds
