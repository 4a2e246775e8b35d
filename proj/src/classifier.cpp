#include "rds/classifier.hpp"

#include <algorithm>
#include <sstream>

#include "rds/error.hpp"
#include "rds/io.hpp"

namespace rds {

const char* to_string(Answer a) {
  switch (a) {
    case Answer::yes: return "yes";
    case Answer::no: return "no";
    case Answer::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Json ClassifierParams::to_json() const {
  return {{"mc", mc_params_json(mc)},
          {"n_windows", n_windows},
          {"n_pull", n_pull},
          {"seed", seed},
          {"fit_tol", fit_tol},
          {"strict", strict},
          {"min_windows", min_windows},
          {"rotation_samples", rotation_samples},
          {"rotation_yes", rotation_yes},
          {"rotation_no", rotation_no},
          {"lift_tol", lift_tol}};
}

Json Verdict::to_json() const {
  return {{"orientational", to_string(orientational)},
          {"topological", to_string(topological)},
          {"case_label", case_label},
          {"topological_case", topological_case},
          {"evidence", evidence},
          {"notes", notes}};
}

std::string Verdict::summary() const {
  std::ostringstream os;
  os << "orientational: " << to_string(orientational) << " (case " << case_label << ")\n"
     << "topological:   " << to_string(topological) << " (case " << topological_case << ")\n";
  for (const auto& n : notes) os << "note: " << n << '\n';
  return os.str();
}

namespace {

bool has_symmetry(const MinimalStructure& s) {
  return s.whole_circle && s.antonov_case != AntonovCase::contractive;
}

// Coupled-attractor test for symmetric minimal families of order m.
Answer deterministic_test(const RandomHomeoFamily& f, const RandomHomeoFamily& g, int m,
                          const ClassifierParams& p, Json& ev, std::vector<std::string>& notes) {
  const auto cloud = coupled_attractor_graph(f, g, m, p.n_windows, p.n_pull, p.seed, p.exec);
  ev["cloud"] = {{"windows", cloud.windows}, {"skipped", cloud.skipped},
                 {"points", static_cast<int>(cloud.points.size())}};
  if (cloud.points.size() < 100) {
    notes.push_back("too few collapsed windows for the graph test");
    return Answer::inconclusive;
  }
  const auto gt = graph_homeomorphism_test(cloud.points, p.fit_tol);
  ev["graph"] = gt.to_json();
  if (!gt.is_curve) {
    if (p.strict && static_cast<int>(cloud.points.size()) < p.min_windows) {
      notes.push_back("attractor cloud is not a curve, but below the evidence floor");
      return Answer::inconclusive;
    }
    notes.push_back("attractor cloud is not the graph of a homeomorphism (fit deviation " +
                    fmt17(gt.max_deviation) + " over " + std::to_string(cloud.points.size()) +
                    " windows)");
    return Answer::no;
  }
  const auto lift = lift_factor_conjugacy(f, g, m, *gt.K, 4096, p.lift_tol);
  ev["lift"] = lift.to_json();
  notes.push_back(lift.reason);
  return lift.kappa && lift.offset == 0 ? Answer::yes : Answer::no;
}

void check_inputs(const RandomHomeoFamily& f, const RandomHomeoFamily& g) {
  if (!(f.noise() == g.noise()))
    throw PreconditionError("families must share a noise model to be compared");
  if (f.traits().target_only || g.traits().target_only)
    throw PreconditionError("canonical families are conjugacy targets, not inputs");
}

}  // namespace

Verdict classify_orientational(const RandomHomeoFamily& f, const RandomHomeoFamily& g,
                               const ClassifierParams& p) {
  check_inputs(f, g);
  Verdict v;
  v.evidence["family_f"] = f.descriptor();
  v.evidence["family_g"] = g.descriptor();
  MinimalStructure sf, sg;
  try {
    sf = estimate_minimal_structure(f, p.mc);
    sg = estimate_minimal_structure(g, p.mc);
  } catch (const Error& e) {
    v.notes.push_back(std::string("structure estimation failed: ") + e.what());
    return v;
  }
  v.evidence["structure_f"] = sf.to_json();
  v.evidence["structure_g"] = sg.to_json();

  const int kf = sf.whole_circle ? 1 : sf.k;
  const int kg = sg.whole_circle ? 1 : sg.k;
  auto decide = [&](Answer a, const char* label) {
    v.orientational = a;
    if (a == Answer::yes) v.case_label = label;
  };

  if (kf != kg) {
    v.notes.push_back("numbers of minimal-set components differ");
    decide(Answer::no, "none");
  } else if (kf >= 2) {
    if (sf.l == sg.l) {
      decide(Answer::yes, "a");
    } else {
      v.notes.push_back("rotation indices differ");
      decide(Answer::no, "none");
    }
  } else if (!has_symmetry(sf) && !has_symmetry(sg)) {
    decide(Answer::yes, "b");
  } else if (has_symmetry(sf) != has_symmetry(sg) || sf.antonov_case != sg.antonov_case) {
    v.notes.push_back("symmetry types differ");
    decide(Answer::no, "none");
  } else if (sf.antonov_case == AntonovCase::rotation) {
    double sup = 0.0;
    const CirclePoint zero(0.0);
    for (int i = 0; i < p.rotation_samples; ++i) {
      const NoisePoint a = f.noise().sample(p.seed, i);
      sup = std::max(sup, dist(f.eval(a, zero), g.eval(a, zero)));
    }
    v.evidence["rotation_difference"] = sup;
    if (sup < p.rotation_yes) {
      decide(Answer::yes, "c");
    } else if (sup > p.rotation_no) {
      v.notes.push_back("random rotations with different rotation amounts");
      decide(Answer::no, "none");
    } else {
      v.notes.push_back("rotation amounts differ by a sub-threshold amount");
    }
  } else if (sf.symmetry_order != sg.symmetry_order) {
    v.notes.push_back("symmetry orders differ");
    decide(Answer::no, "none");
  } else {
    const int m = sf.symmetry_order;
    Json ev = Json::object();
    const Answer a = deterministic_test(f, g, m, p, ev, v.notes);
    v.evidence["deterministic"] = ev;
    decide(a, m >= 3 ? "c" : "d");
  }
  if (v.orientational == Answer::yes) {
    v.topological = Answer::yes;
  } else {
    v.notes.push_back("topological conjugacy not evaluated by the orientational test");
  }
  return v;
}

Verdict classify_topological(const RandomHomeoFamily& f, const RandomHomeoFamily& g,
                             const ClassifierParams& p) {
  check_inputs(f, g);
  const Verdict direct = classify_orientational(f, g, p);
  const Verdict mirrored = classify_orientational(f, mirror(g), p);
  Verdict v;
  v.orientational = direct.orientational;
  v.case_label = direct.case_label;
  if (direct.orientational == Answer::yes || mirrored.orientational == Answer::yes)
    v.topological = Answer::yes;
  else if (direct.orientational == Answer::no && mirrored.orientational == Answer::no)
    v.topological = Answer::no;
  else
    v.topological = Answer::inconclusive;

  if (v.topological == Answer::yes) {
    const std::string lab = direct.orientational == Answer::yes ? direct.case_label : mirrored.case_label;
    if (lab == "a") v.topological_case = "a'";
    else if (lab == "b") v.topological_case = "b'";
    else v.topological_case = "c'";
  }
  v.evidence["direct"] = direct.evidence;
  v.evidence["mirrored"] = mirrored.evidence;
  for (const auto& n : direct.notes)
    if (n != "topological conjugacy not evaluated by the orientational test") v.notes.push_back(n);
  for (const auto& n : mirrored.notes)
    if (n != "topological conjugacy not evaluated by the orientational test") v.notes.push_back("mirrored: " + n);
  return v;
}

}  // namespace rds
