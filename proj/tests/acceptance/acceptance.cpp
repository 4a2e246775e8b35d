// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria (capped at 100).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rds/classifier.hpp"
#include "rds/conjugacy.hpp"
#include "rds/dynamics.hpp"
#include "rds/error.hpp"
#include "rds/structure.hpp"

using namespace rds;

namespace {

constexpr double kPi = std::numbers::pi;
const double kEps3 = 1 / (2 * kPi);

struct Outcome {
  bool ok = true;
  std::vector<std::string> details;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!cond || details.size() < 12) details.push_back((cond ? "" : "FAILED ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Pair {
  std::string name;
  RandomHomeoFamily f, g;
  Answer expected;
};

ClassifierParams table_params() {
  ClassifierParams p;
  p.n_windows = 200;
  p.n_pull = 512;
  return p;
}

// Runs each pair under a per-run time limit.
void verdict_table(Outcome& out, const std::vector<Pair>& pairs, double limit_s) {
  for (const auto& pr : pairs) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto v = classify_orientational(pr.f, pr.g, table_params());
    const double dt = seconds_since(t0);
    out.expect(v.orientational == pr.expected,
               pr.name + ": " + to_string(v.orientational) + " (case " + v.case_label + "), expected " +
                   to_string(pr.expected));
    out.expect(dt < limit_s, pr.name + fmt(": %.2f s", dt));
  }
}

std::vector<Pair> example1_pairs() {
  return {{"(1,0,0.05|1,0,0.3)", example1(1, 0, 0.05), example1(1, 0, 0.3, 1), Answer::yes},
          {"(2,1,0.05|2,1,0.05)", example1(2, 1, 0.05), example1(2, 1, 0.05, 1), Answer::yes},
          {"(2,1,0.2|2,1,0.2)", example1(2, 1, 0.2), example1(2, 1, 0.2, 1), Answer::no},
          {"(2,1,0.05|2,0,0.05)", example1(2, 1, 0.05), example1(2, 0, 0.05, 1), Answer::no},
          {"(1,0,0.05|2,1,0.05)", example1(1, 0, 0.05), example1(2, 1, 0.05, 1), Answer::no}};
}

std::vector<Pair> example2_pairs() {
  return {{"k=1 r=0.2", example2(1, 0, 0.2), example2(1, 0, 0.2, -1), Answer::yes},
          {"k=2 l=1 r=0.2", example2(2, 1, 0.2), example2(2, 1, 0.2, -1), Answer::yes},
          {"k=3 l=1 r=0.2", example2(3, 1, 0.2), example2(3, 1, 0.2, -1), Answer::no},
          {"k=3 l=1 r=0.04", example2(3, 1, 0.04), example2(3, 1, 0.04, -1), Answer::yes}};
}

std::vector<Pair> example3_pairs() {
  return {{"eps=1/2pi c=0.1|0.37", example3(kEps3, 0.1), example3(kEps3, 0.37), Answer::yes}};
}

Outcome criterion1() {
  Outcome o;
  verdict_table(o, example1_pairs(), 60.0);
  return o;
}

Outcome criterion2() {
  Outcome o;
  verdict_table(o, example2_pairs(), 90.0);
  const auto v = classify_orientational(example2(2, 1, 0.2), example2(2, 1, 0.2, -1), table_params());
  const auto& det = v.evidence.value("deterministic", Json::object());
  const bool reversing = det.contains("graph") && det.at("graph").value("orientation", 0) == -1;
  o.expect(v.case_label == "d" && reversing, "k=2 conjugacy found through an orientation-reversing factor map");
  return o;
}

double build_residual(const RandomHomeoFamily& f, const MinimalStructure& s, const RandomHomeoFamily& target,
                      int half_width, std::uint64_t seed, ConjugacyParams p = {}) {
  const auto w = NoiseWindow::generate(f.noise(), seed, half_width);
  const auto b = build_conjugacy(f, s, w, p);
  return conjugation_residual(f, target, w, b.h0, b.h1, 512);
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  verdict_table(o, example3_pairs(), 120.0);
  const auto f = example3(kEps3, 0.1);
  const auto s = estimate_minimal_structure(f);
  const auto g = canonical(1, 0);
  ConjugacyParams p;
  p.n_h = 40;
  const double r200 = build_residual(f, s, g, 200, 0xacce55, p);
  o.expect(r200 < 1e-2, fmt("residual N=200 n_h=40: %.3e < 1e-2", r200));
  const double r100 = build_residual(f, s, g, 100, 0xacce55);
  const double r400 = build_residual(f, s, g, 400, 0xacce55);
  o.expect(r400 < r100, fmt("residual N=100: %.3e", r100) + fmt(" > N=400: %.3e", r400));
  const double dt = seconds_since(t0);
  o.expect(dt < 120.0, fmt("total %.2f s", dt));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto a = estimate_minimal_structure(example1(2, 1, 0.05));
  o.expect(a.k == 2 && a.l == 1, "example1(2,1,0.05): k=" + std::to_string(a.k) + " l=" + std::to_string(a.l));
  o.expect(a.component_of(CirclePoint(0.25)) >= 0 && a.component_of(CirclePoint(0.75)) >= 0,
           "components contain 0.25 and 0.75");
  o.expect(a.component_of(CirclePoint(0.0)) < 0 && a.component_of(CirclePoint(0.5)) < 0,
           "components exclude 0 and 0.5");
  const auto b = estimate_minimal_structure(example1(2, 1, 0.2));
  o.expect(b.whole_circle, "example1(2,1,0.2): whole circle");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<int, int>> kl = {{1, 0}, {2, 0}, {2, 1}};
  const std::vector<RandomHomeoFamily> fams = {example1(1, 0, 0.05), example1(2, 0, 0.05), example1(2, 1, 0.05)};
  for (std::size_t i = 0; i < fams.size(); ++i) {
    const auto s = estimate_minimal_structure(fams[i]);
    const auto w = NoiseWindow::generate(fams[i].noise(), 0x5ca1e, 200);
    const auto b = build_conjugacy(fams[i], s, w);
    std::string row = "(" + std::to_string(kl[i].first) + "," + std::to_string(kl[i].second) + ") vs";
    for (std::size_t j = 0; j < kl.size(); ++j) {
      const double r = conjugation_residual(fams[i], canonical(kl[j].first, kl[j].second), w, b.h0, b.h1, 512);
      row += fmt(" %.3e", r);
      if (i == j) o.ok = o.ok && r < 1e-2;
      else o.ok = o.ok && r > 0.05;
    }
    o.details.push_back(row);
  }
  const double dt = seconds_since(t0);
  o.expect(dt < 300.0, fmt("total %.2f s (diagonal < 1e-2, off-diagonal > 0.05)", dt));
  return o;
}

// Raw terms: each step lies in [term_n, limit] exactly. Perturbed terms:
// strictly inside ]z_(n-1), limit[ until they reach the limit in floating
// point, after which they stay there.
void check_monotone(const std::vector<CirclePoint>& raw, const std::vector<CirclePoint>& pert, bool increasing,
                    int& raw_bad, int& strict_bad, double& worst_gap) {
  auto inside = [&](CirclePoint from, CirclePoint lim, CirclePoint x, bool open) {
    const Arc arc = increasing ? Arc(from, lim) : Arc(lim, from);
    return open ? arc.contains_open(x) : arc.contains(x);
  };
  const CirclePoint rl = raw.back();
  for (std::size_t n = 0; n + 1 < raw.size(); ++n)
    if (!inside(raw[n], rl, raw[n + 1], false)) {
      ++raw_bad;
      worst_gap = std::max(worst_gap, dist(raw[n + 1], raw[n]));
    }
  const CirclePoint pl = pert.back();
  bool reached = pert[0] == pl;
  for (std::size_t n = 1; n < pert.size() && !reached; ++n) {
    if (pert[n] == pl) {
      reached = true;
      if (pert[n - 1] == pl) ++strict_bad;
      continue;
    }
    if (!inside(pert[n - 1], pl, pert[n], true)) {
      ++strict_bad;
      worst_gap = std::max(worst_gap, dist(pert[n], pert[n - 1]));
    }
  }
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* name;
    RandomHomeoFamily f;
  };
  const std::vector<Case> cases = {{"example1(2,1,0.05)", example1(2, 1, 0.05)}, {"example3(1/2pi,0.1)", example3(kEps3, 0.1)}};
  for (const auto& c : cases) {
    const auto s = estimate_minimal_structure(c.f);
    AnchorParams ap;
    if (s.whole_circle) ap.epsilons = probe_epsilons(c.f, ap);
    int raw_bad = 0, strict_bad = 0, windows = 0, sequences = 0;
    double worst_gap = 0.0;
    for (int wi = 0; wi < 100; ++wi) {
      const auto w = NoiseWindow::generate(c.f.noise(), derive_seed(0x6d6f6e, wi), 300);
      const auto A = anchor_sequences(c.f, s, w, 149, ap);
      ++windows;
      for (int comp = 0; comp < A.k; ++comp)
        for (Side side : {Side::u, Side::v}) {
          const auto raw = anchor_terms(c.f, w, A, side, comp, 0, 140, true);
          const auto pert = anchor_terms(c.f, w, A, side, comp, 0, 140, false);
          const bool up = side == Side::u;
          check_monotone(raw.forward, pert.forward, up, raw_bad, strict_bad, worst_gap);
          check_monotone(raw.backward, pert.backward, !up, raw_bad, strict_bad, worst_gap);
          sequences += 4;
        }
    }
    o.expect(raw_bad == 0 && strict_bad == 0,
             std::string(c.name) + ": " + std::to_string(windows) + " windows, " + std::to_string(sequences) +
                 " sequences, raw violations " + std::to_string(raw_bad) + ", strictness violations " +
                 std::to_string(strict_bad) + fmt(", largest step against the order %.1e", worst_gap));
  }
  const double dt = seconds_since(t0);
  o.expect(dt < 60.0, fmt("total %.2f s", dt));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  {
    const auto r = linear_rotation(0.1, 0.3);
    const auto w = NoiseWindow::generate(r.noise(), 7, 500);
    const int grid = 64;
    const auto rep = pullback_grid_clusters(r, w, grid, 500);
    double worst = 0.0;
    for (int j = 0; j < grid; ++j)
      worst = std::max(worst, std::abs(dist(rep.images[j], rep.images[(j + 1) % grid]) - 1.0 / grid));
    o.expect(worst < 1e-12, fmt("rotation: grid spacing preserved to %.1e", worst));
  }
  {
    const auto f = example3(kEps3, 0.0);
    const double rate = contraction_rate(f, NoiseWindow::generate(f.noise(), 7, 500), 500, 0.05);
    o.expect(rate < 0.0, fmt("example3(1/2pi,0) contraction rate %.4f < 0", rate));
  }
  {
    const auto f = example1(2, 1, 0.2);
    const auto z = factor(f, 2);
    const auto w = NoiseWindow::generate(f.noise(), 7, 600);
    const auto lifted = pullback_grid_clusters(f, w, 64, 600);
    const auto factored = pullback_grid_clusters(z, w, 64, 600);
    o.expect(factored.centers.size() == 1, "factor by half-turn: " + std::to_string(factored.centers.size()) + " cluster(s)");
    const bool two = lifted.centers.size() == 2;
    const double sep = two ? dist(lifted.centers[0] + CirclePoint(0.5), lifted.centers[1]) : 1.0;
    o.expect(two && sep < 1e-6, "unfactored: " + std::to_string(lifted.centers.size()) +
                                    " clusters" + fmt(", half-turn mismatch %.1e", sep));
  }
  const double dt = seconds_since(t0);
  o.expect(dt < 120.0, fmt("total %.2f s", dt));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const NoisePoint zero{0.0};
  for (int k : {2, 3, 4}) {
    double worst = 0.0;
    for (int l = 0; l < k; ++l) {
      const auto z = factor(canonical(k, l), k);
      for (int j = 0; j < 10000; ++j) {
        const double y = j / 10000.0;
        const double oracle = y + std::sin(2 * kPi * y) / (2 * kPi);
        worst = std::max(worst, dist(z.eval(zero, CirclePoint(y)), CirclePoint(oracle)));
      }
    }
    o.expect(worst < 1e-12, "k=" + std::to_string(k) + fmt(": sup %.2e", worst));
  }
  const double dt = seconds_since(t0);
  o.expect(dt < 5.0, fmt("total %.2f s", dt));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Pair> pairs = example1_pairs();
  for (auto& p : example2_pairs()) pairs.push_back(p);
  for (auto& p : example3_pairs()) pairs.push_back(p);
  const auto params = table_params();
  int reflexive_fail = 0, symmetry_fail = 0, implication_fail = 0, rotation_fail = 0, checks = 0;
  const double shifts[] = {0.1234, 0.61};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pr = pairs[i];
    for (const auto* fam : {&pr.f, &pr.g}) {
      const auto v = classify_topological(*fam, *fam, params);
      if (v.orientational != Answer::yes) {
        ++reflexive_fail;
        o.details.push_back("FAILED reflexivity: " + fam->descriptor().dump());
      }
      ++checks;
    }
    const auto fg = classify_topological(pr.f, pr.g, params);
    const auto gf = classify_topological(pr.g, pr.f, params);
    if (fg.orientational != gf.orientational || fg.topological != gf.topological) {
      ++symmetry_fail;
      o.details.push_back("FAILED symmetry: " + pr.name);
    }
    for (const auto* v : {&fg, &gf})
      if (v->orientational == Answer::yes && v->topological != Answer::yes) ++implication_fail;
    const double c = shifts[i % 2];
    const auto rc = classify_topological(pr.f, rotate_conjugate(pr.g, CirclePoint(c)), params);
    if (rc.orientational != fg.orientational || rc.topological != fg.topological) {
      ++rotation_fail;
      o.details.push_back("FAILED rotation invariance: " + pr.name + fmt(" c=%.4f", c) + " -> " +
                          to_string(rc.orientational) + "/" + to_string(rc.topological) + " vs " +
                          to_string(fg.orientational) + "/" + to_string(fg.topological));
    }
    checks += 4;
  }
  o.ok = reflexive_fail + symmetry_fail + implication_fail + rotation_fail == 0;
  o.details.push_back(std::to_string(pairs.size()) + " pairs, " + std::to_string(checks) +
                      " checks; failures: reflexivity " + std::to_string(reflexive_fail) + ", symmetry " +
                      std::to_string(symmetry_fail) + ", implication " + std::to_string(implication_fail) +
                      ", rotation " + std::to_string(rotation_fail));
  const double dt = seconds_since(t0);
  o.expect(dt < 600.0, fmt("total %.2f s", dt));
  return o;
}

Outcome criterion10() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = example3(kEps3, 0.1);
  double worst = 0.0;
  for (int wi = 0; wi < 100; ++wi) {
    const auto w = NoiseWindow::generate(f.noise(), derive_seed(0xe9a1, wi), 600);
    auto attractor = [&](const NoiseWindow& v) {
      return pullback_forward(f, v, [](int) { return CirclePoint(0.0); }, 500).limit;
    };
    worst = std::max(worst, dist(f.eval(w.at(0), attractor(w)), attractor(w.shifted(1))));
  }
  o.expect(worst < 1e-8, fmt("100 windows, max |f(a(w)) - a(theta w)| = %.2e", worst));
  const double dt = seconds_since(t0);
  o.expect(dt < 30.0, fmt("total %.2f s", dt));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Example 1 verdict table", criterion1},
      {"Example 2 verdicts", criterion2},
      {"Example 3 verdict and conjugacy residual", criterion3},
      {"Structure estimation containment", criterion4},
      {"Cross-residual matrix separates (k,l)", criterion5},
      {"Monotone and strictly ordered pullback terms", criterion6},
      {"Contraction properties", criterion7},
      {"Factor identity for canonical maps", criterion8},
      {"Relation properties of verdicts", criterion9},
      {"Attractor equivariance", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (!o.ok) ++failed;
    std::printf("%s %2zu %s (%.1f s)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, dt);
    for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return std::min(failed, 100);
}
