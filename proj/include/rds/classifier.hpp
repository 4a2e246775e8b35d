#pragma once

// Orientational and topological conjugacy verdicts for two families over a
// common noise model.

#include <cstdint>
#include <string>
#include <vector>

#include "rds/conjugacy.hpp"
#include "rds/family.hpp"
#include "rds/structure.hpp"

namespace rds {

enum class Answer { yes, no, inconclusive };
const char* to_string(Answer a);

struct ClassifierParams {
  McParams mc;
  int n_windows = 200;         ///< windows for the coupled-attractor cloud
  int n_pull = 512;            ///< pullback depth per window
  std::uint64_t seed = 0xc1a55ULL;
  double fit_tol = 5e-3;
  bool strict = true;          ///< downgrade statistical "no" below the evidence floor
  int min_windows = 200;       ///< evidence floor for a statistical "no"
  int rotation_samples = 1000;
  double rotation_yes = 1e-8;
  double rotation_no = 1e-3;
  double lift_tol = 2e-2;
  Exec exec = Exec::parallel;
  Json to_json() const;
};

struct Verdict {
  Answer orientational = Answer::inconclusive;
  Answer topological = Answer::inconclusive;
  std::string case_label = "none";           ///< a | b | c | d | none
  std::string topological_case = "none";     ///< a' | b' | c' | none
  Json evidence = Json::object();
  std::vector<std::string> notes;

  Json to_json() const;
  std::string summary() const;
};

/// Decision tree for orientational conjugacy. Throws PreconditionError when
/// the noise models differ or an input is a target-only family.
Verdict classify_orientational(const RandomHomeoFamily& fam_f, const RandomHomeoFamily& fam_g,
                               const ClassifierParams& params = {});

/// Combines the orientational verdicts for (f, g) and (f, mirror(g)).
Verdict classify_topological(const RandomHomeoFamily& fam_f, const RandomHomeoFamily& fam_g,
                             const ClassifierParams& params = {});

}  // namespace rds
