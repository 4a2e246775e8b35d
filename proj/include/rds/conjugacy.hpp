#pragma once

// Random conjugacy to the canonical model g_{k,l}, conjugation residuals, and
// the coupled-attractor test for deterministic conjugacy of symmetric
// minimal families.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rds/circle.hpp"
#include "rds/dynamics.hpp"
#include "rds/family.hpp"
#include "rds/kernels.hpp"
#include "rds/structure.hpp"

namespace rds {

/// Orientation-preserving circle homeomorphism interpolating nodes linearly
/// on lifts. Construction throws ConjugacyError unless the nodes are strictly
/// increasing in both coordinates with total winding one.
class PiecewiseCircleMap {
public:
  explicit PiecewiseCircleMap(std::vector<std::pair<CirclePoint, CirclePoint>> nodes);
  static PiecewiseCircleMap identity();

  CirclePoint operator()(CirclePoint x) const;
  CirclePoint inverse(CirclePoint y) const;

  std::size_t size() const { return xs_.size(); }
  std::vector<std::pair<CirclePoint, CirclePoint>> nodes() const;
  const std::vector<double>& x_nodes() const { return xs_; }
  /// Lifted y-values: y_lift()[0] in [0,1), strictly increasing, span < 1.
  const std::vector<double>& y_lift() const { return ys_; }

private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// A circle homeomorphism of either orientation: x -> s * P(x) with s = +-1
/// and P orientation-preserving.
struct SignedCircleMap {
  int orientation = 1;
  PiecewiseCircleMap increasing = PiecewiseCircleMap::identity();

  CirclePoint operator()(CirclePoint x) const;
  CirclePoint inverse(CirclePoint y) const;
};

struct AnchorParams {
  double genericity_tol = 1e-9;
  int probe_windows = 32;                 ///< windows for the epsilon selection
  int probe_half_width = 200;
  std::uint64_t probe_seed = 0xe95107ULL;
  int track_grid = 16;                    ///< grid for attractor/repeller tracking
  Exec exec = Exec::parallel;
  /// Precomputed (epsilon_u, epsilon_v); skips the probe when set.
  std::optional<std::pair<double, double>> epsilons;
};

/// Anchor offsets of the contractive case: half the median anticlockwise
/// repeller-to-attractor and attractor-to-repeller distances over the probe
/// windows. Depends on the family and the probe settings only.
std::pair<double, double> probe_epsilons(const RandomHomeoFamily& fam, const AnchorParams& p = {});

/// Two-sided anchor data on one window. For base index b the raw sequence is
/// x_t = d-G_{b+tl} (case B) or the epsilon anchor u(theta^t w) (case A), and
/// the perturbed sequence y_t is its anticlockwise perturbation; likewise for
/// the v-side with d+G and clockwise perturbation.
struct AnchorSet {
  int k = 1;
  int l = 0;
  bool contractive_case = false;  ///< case A (minimal, contractive)
  double epsilon_u = 0.0;
  double epsilon_v = 0.0;
  int t_begin = 0;                ///< first window index covered
  int t_end = 0;                  ///< one past the last
  int a_valid_from = 0;           ///< attractor estimates trusted for t >= this
  int r_valid_to = 0;             ///< repeller estimates trusted for t < this
  std::vector<std::vector<CirclePoint>> u_raw, u, v_raw, v;  ///< [b][t - t_begin]
  /// Case A only: u_raw at t is the exact preimage of u_raw at t + 1 (same for v).
  std::vector<std::vector<char>> u_pulled, v_pulled;
  std::vector<std::vector<CirclePoint>> attractor;  ///< [c][t - t_begin]: a_c(theta^t w)
  std::vector<std::vector<CirclePoint>> repeller;   ///< [c][t - t_begin]: r_c(theta^t w)

  int base_of(int component, int time) const;
  CirclePoint at(const std::vector<std::vector<CirclePoint>>& seq, int b, int t) const;
  CirclePoint a(int component, int time) const;
  CirclePoint r(int component, int time) const;
};

/// Builds the anchor data. Throws ConjugacyError when the raw sequences are
/// not generic (every step maps an anchor exactly onto the next one, which
/// the non-degeneracy hypothesis on the family excludes).
AnchorSet anchor_sequences(const RandomHomeoFamily& fam, const MinimalStructure& s,
                           const NoiseWindow& window, int n_max, const AnchorParams& p = {});

enum class Side { u, v };

/// Strict pullback terms at time `time` for `component`: element n is the
/// n-th term (n >= 0) and the second vector holds the terms -n (n >= 0), both
/// computed from the perturbed (or, if raw, unperturbed) anchors.
struct TwoSidedTerms {
  std::vector<CirclePoint> forward;   ///< n = 0, 1, ...
  std::vector<CirclePoint> backward;  ///< n = 0, -1, -2, ...
};
TwoSidedTerms anchor_terms(const RandomHomeoFamily& fam, const NoiseWindow& window,
                           const AnchorSet& anchors, Side side, int component, int time, int n_max,
                           bool raw = false);

/// Zero means "derive from the window half-width N": n_h = N / 5 and
/// interior = max(2, N / 25). With both fixed the nodes near time 0 do not
/// depend on N, since windows with a common seed are nested.
struct ConjugacyParams {
  int n_h = 0;
  int interior = 0;  ///< interior nodes per pullback interval
  AnchorParams anchors;
};

/// Copy of p with automatic values filled in for this window.
ConjugacyParams resolve_params(const ConjugacyParams& p, const NoiseWindow& window);

struct ConjugacyBuild {
  int k = 1;
  int l = 0;
  PiecewiseCircleMap h0 = PiecewiseCircleMap::identity();  ///< h_w
  PiecewiseCircleMap h1 = PiecewiseCircleMap::identity();  ///< h_{theta w}
  AnchorSet anchors;
  std::vector<CirclePoint> a0, r0;  ///< pinned attractor / repeller points at time 0
};

/// h at time `shift` from precomputed anchors.
PiecewiseCircleMap assemble_conjugacy(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                      const AnchorSet& anchors, int shift, const ConjugacyParams& p);

/// Anchors plus h_w and h_{theta w}.
ConjugacyBuild build_conjugacy(const RandomHomeoFamily& fam, const MinimalStructure& s,
                               const NoiseWindow& window, const ConjugacyParams& p = {});

/// sup over a uniform grid of dist(h1(f_{a_0}(x)), g_{a_0}(h0(x))).
double conjugation_residual(const RandomHomeoFamily& fam, const RandomHomeoFamily& target,
                            const NoiseWindow& window, const PiecewiseCircleMap& h0,
                            const PiecewiseCircleMap& h1, int grid, Exec exec = Exec::parallel);

struct ConjugacyReport {
  int k = 1;
  int l = 0;
  std::uint64_t seed = 0;
  int half_width = 0;
  int n_h = 0;
  std::size_t node_count = 0;
  double residual_sup = 0.0;
  std::vector<std::pair<int, double>> residual_trend;  ///< (N, residual)
  Json to_json() const;
};

/// CSV with columns x,y (the lifted y of the node).
void write_nodes_csv(std::ostream& os, const PiecewiseCircleMap& h);

// ---- deterministic conjugacy of symmetric minimal families -----------------

struct AttractorCloud {
  std::vector<std::pair<CirclePoint, CirclePoint>> points;  ///< (A_f, A_g) by window ordinal
  int windows = 0;
  int skipped = 0;
};

/// Attractors of factor(f, m) and factor(g, m) on shared windows.
AttractorCloud coupled_attractor_graph(const RandomHomeoFamily& fam_f, const RandomHomeoFamily& fam_g,
                                       int m, int n_windows, int n_pull, std::uint64_t seed,
                                       Exec exec = Exec::parallel);

struct GraphTest {
  bool is_curve = false;
  int orientation = 0;          ///< +1 or -1 when is_curve
  double max_deviation = 0.0;   ///< leave-one-out interpolation deviation
  int sign_changes = 0;
  double winding = 0.0;
  std::optional<SignedCircleMap> K;
  Json to_json() const;
};

/// Decides whether the cloud is the graph of a circle homeomorphism.
GraphTest graph_homeomorphism_test(const std::vector<std::pair<CirclePoint, CirclePoint>>& cloud,
                                   double fit_tol);

struct LiftResult {
  std::optional<SignedCircleMap> kappa;  ///< set when some offset passes
  int offset = -1;                       ///< i with kappa f kappa^{-1} = tau_m^i g
  std::vector<double> residuals;         ///< per offset
  std::string reason;
  Json to_json() const;
};

/// Lifts a factor conjugacy K (G = K F K^{-1}) to kappa with z_m(kappa) = K
/// by branch tracking from [0], and measures which rotation offset relates
/// kappa f kappa^{-1} to g.
LiftResult lift_factor_conjugacy(const RandomHomeoFamily& fam_f, const RandomHomeoFamily& fam_g, int m,
                                 const SignedCircleMap& K, int grid = 4096, double tol = 2e-2,
                                 int n_alpha = 32);

}  // namespace rds
