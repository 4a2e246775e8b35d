#pragma once

// Cocycle iteration over finite noise windows, pullback limits, contraction
// diagnostics and the perturbation of two-sided sequences.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rds/circle.hpp"
#include "rds/family.hpp"
#include "rds/kernels.hpp"
#include "rds/noise.hpp"

namespace rds {

/// phi(n, w)(x): f_{a_(n-1)} o ... o f_{a_0} for n > 0, the inverse of
/// f_{a_(-1)} o ... o f_{a_(-n)} for n < 0, identity for n = 0.
CirclePoint cocycle(const RandomHomeoFamily& fam, const NoiseWindow& window, int n, CirclePoint x);

enum class PullbackKind { forward, backward };
/// Order in which terms approach the limit: increasing = anticlockwise.
enum class ArcOrder { increasing, decreasing };

struct PullbackSequence {
  int anchor_index = 0;
  PullbackKind kind = PullbackKind::forward;
  std::vector<CirclePoint> terms;  ///< terms[n] for n = 0 .. terms.size()-1
  CirclePoint limit;
  bool converged = false;
  double gap = 1.0;  ///< distance between the last two distinct terms

  /// terms[n], or the limit once the sequence has saturated.
  CirclePoint term(int n) const;
};

struct PullbackOptions {
  double tol = 1e-10;                 ///< convergence threshold on the Cauchy gap
  std::optional<ArcOrder> order;      ///< checked when set and the sequence converged
  double order_tol = 1e-9;            ///< slack for the monotonicity check
  int saturation_repeats = 4;         ///< stop after this many identical terms
  int anchor_index = 0;
};

using IndexedPoint = std::function<CirclePoint(int)>;

/// Terms phi(n, theta^{-n} w)(x_of_index(-n)), n = 0..n_max.
PullbackSequence pullback_forward(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                  const IndexedPoint& x_of_index, int n_max,
                                  const PullbackOptions& opt = {});

/// Terms phi(-n, theta^{n} w)(x_of_index(n)), n = 0..n_max.
PullbackSequence pullback_backward(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                   const IndexedPoint& x_of_index, int n_max,
                                   const PullbackOptions& opt = {});

struct ClusterReport {
  std::vector<CirclePoint> images;   ///< grid images in grid order
  std::vector<CirclePoint> centers;  ///< anticlockwise-sorted cluster midpoints
  std::vector<double> diameters;     ///< arc length of each cluster
  std::vector<int> sizes;            ///< number of images per cluster
  double max_diameter = 0.0;
  double image_spread = 0.0;         ///< 1 - largest circular gap between images
};

/// Clusters a set of circle points: neighbours (after sorting) whose circular
/// gap is below `gap_threshold` share a cluster.
ClusterReport cluster_points(std::vector<CirclePoint> points, double gap_threshold);

/// Pushes a uniform grid through phi(n_max, theta^{-n_max} w) and clusters
/// the images with gap threshold 1 / (4 grid_size).
ClusterReport pullback_grid_clusters(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                     int grid_size, int n_max, Exec exec = Exec::parallel);

/// Backward analogue: grid through phi(-n_max, theta^{n_max} w).
ClusterReport pushback_grid_clusters(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                     int grid_size, int n_max, Exec exec = Exec::parallel);

/// Least-squares slope of log(length) of phi(n, w)[r + e, r - e] against n,
/// where r is a repeller estimate from the future of the window and e the
/// exclusion radius.
double contraction_rate(const RandomHomeoFamily& fam, const NoiseWindow& window, int n_max,
                        double exclusion_radius);

using CircleMap = std::function<CirclePoint(CirclePoint)>;

/// Anticlockwise (increasing) or clockwise (decreasing) perturbation of xs by
/// maps, where maps[n] sends index n to n + 1 and maps.size() == xs.size() - 1.
/// The first and last indices count as generic. When `orbit` is given, the hypothesis
/// f_{n-1}(x_{n-1}) in [x_n, a_n[ (resp. ]a_n, x_n]) is checked.
std::vector<CirclePoint> perturb_sequence(const std::vector<CircleMap>& maps,
                                          const std::vector<CirclePoint>& xs, ArcOrder direction,
                                          double genericity_tol = 1e-9,
                                          const std::vector<CirclePoint>* orbit = nullptr);

/// Same, with the generic steps given explicitly: generic[n] says whether
/// maps[n](xs[n]) differs from xs[n + 1]. For sequences whose ties are known
/// by construction, where a tolerance test would misread rounding.
std::vector<CirclePoint> perturb_sequence(const std::vector<CircleMap>& maps,
                                          const std::vector<CirclePoint>& xs, ArcOrder direction,
                                          const std::vector<char>& generic,
                                          const std::vector<CirclePoint>* orbit = nullptr);

/// Indices n in [0, xs.size()-1) with dist(maps[n](xs[n]), xs[n+1]) > tol.
std::vector<int> genericity_set(const std::vector<CircleMap>& maps,
                                const std::vector<CirclePoint>& xs, double tol);

/// CSV with columns n,value,gap.
void write_pullback_csv(std::ostream& os, const PullbackSequence& seq);
/// CSV with columns cluster,center,diameter,size.
void write_cluster_csv(std::ostream& os, const ClusterReport& rep);

}  // namespace rds
