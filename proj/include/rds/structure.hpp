#pragma once

// Estimation of the minimal-set structure of a family: the components
// G_0..G_{k-1}, the rotation index l, p = gcd(k, l), q = k / p, the rigid
// rotational symmetry order and the trichotomy case of a minimal family.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rds/circle.hpp"
#include "rds/family.hpp"
#include "rds/kernels.hpp"

namespace rds {

enum class AntonovCase { contractive, symmetric_lift_contractive, rotation, not_minimal };

const char* to_string(AntonovCase c);

struct McParams {
  std::uint64_t seed = 0x51a7e5eedULL;
  int n_bins = 2048;
  std::int64_t n_samples = 200000;
  int n_burn = 1000;
  int n_chains = 16;
  int gap_min = 3;
  int n_alpha = 64;         ///< noise samples for the l and symmetry checks
  int m_max = 12;
  double symmetry_tol = 1e-9;
  int antonov_windows = 4;  ///< windows used to confirm pullback collapse
  int antonov_n_max = 600;
  bool refine_boundaries = true;
  Exec exec = Exec::parallel;
};

Json mc_params_json(const McParams& mc);

struct MinimalStructure {
  bool whole_circle = false;
  std::vector<Arc> components;  ///< G_0..G_{k-1}, anticlockwise from [0]
  int k = 1;
  int l = 0;
  int p = 1;
  int q = 1;
  double total_gap_measure = 0.0;
  int symmetry_order = 1;
  AntonovCase antonov_case = AntonovCase::not_minimal;
  std::vector<std::string> notes;

  /// H_i = [d+ G_i, d- G_{i+1}].
  Arc gap(int i) const;
  /// Component index modulo k.
  const Arc& component(int i) const;
  /// Index of the component containing x (dilated by `slack`), or -1.
  int component_of(CirclePoint x, double slack = 0.0) const;

  Json to_json() const;
};

/// Occupancy counts of long forward orbits (n_samples visits in total).
std::vector<std::uint64_t> estimate_stationary_histogram(const RandomHomeoFamily& fam,
                                                         std::uint64_t seed, int n_burn,
                                                         std::int64_t n_samples, int n_bins,
                                                         Exec exec = Exec::parallel,
                                                         int n_chains = 16);

/// Components (as bin arcs) separated by runs of >= gap_min empty bins; an
/// empty result means no qualifying gap.
std::vector<Arc> histogram_components(const std::vector<std::uint64_t>& hist, int gap_min);

MinimalStructure estimate_minimal_structure(const RandomHomeoFamily& fam, const McParams& mc = {});

/// Largest m <= m_max such that rotation by 1/m (and by 1/d for every
/// divisor d of m) commutes with the sampled maps to within tol; 1 if none.
int detect_rotational_symmetry(const RandomHomeoFamily& fam, int m_max = 12, int grid = 64,
                               int n_alpha = 16, double tol = 1e-9);

/// Same test for a user-supplied candidate homeomorphism.
bool commutes_with(const RandomHomeoFamily& fam, const std::function<CirclePoint(CirclePoint)>& tau,
                   int grid = 64, int n_alpha = 16, double tol = 1e-9);

/// True when f_alpha(x) - x is independent of x for the sampled alpha.
bool is_random_rotation(const RandomHomeoFamily& fam, int grid = 64, int n_alpha = 32,
                        double tol = 1e-9);

/// Trichotomy case of a minimal family. Throws NumericError when the factor
/// does not collapse to a single cluster (inconclusive).
AntonovCase classify_antonov(const RandomHomeoFamily& fam, const MinimalStructure& s,
                             const McParams& mc = {});

/// CSV with columns bin,left,count.
void write_histogram_csv(std::ostream& os, const std::vector<std::uint64_t>& hist);

}  // namespace rds
