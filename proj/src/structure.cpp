#include "rds/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rds/dynamics.hpp"
#include "rds/error.hpp"
#include "rds/io.hpp"

namespace rds {

const char* to_string(AntonovCase c) {
  switch (c) {
    case AntonovCase::contractive: return "contractive";
    case AntonovCase::symmetric_lift_contractive: return "symmetric_lift_contractive";
    case AntonovCase::rotation: return "rotation";
    case AntonovCase::not_minimal: return "not_minimal";
  }
  return "?";
}

Arc MinimalStructure::gap(int i) const {
  if (whole_circle) throw DomainError("a minimal circle has no gaps");
  return Arc(component(i).end(), component(i + 1).start());
}

const Arc& MinimalStructure::component(int i) const {
  if (components.empty()) throw DomainError("structure has no components");
  const int n = static_cast<int>(components.size());
  return components[static_cast<std::size_t>(((i % n) + n) % n)];
}

int MinimalStructure::component_of(CirclePoint x, double slack) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    const Arc a = slack > 0 ? components[i].dilated(slack) : components[i];
    if (a.contains(x)) return static_cast<int>(i);
  }
  return -1;
}

Json mc_params_json(const McParams& mc) {
  return {{"seed", mc.seed},
          {"n_bins", mc.n_bins},
          {"n_samples", mc.n_samples},
          {"n_burn", mc.n_burn},
          {"n_chains", mc.n_chains},
          {"gap_min", mc.gap_min},
          {"n_alpha", mc.n_alpha},
          {"m_max", mc.m_max},
          {"symmetry_tol", mc.symmetry_tol},
          {"antonov_windows", mc.antonov_windows},
          {"antonov_n_max", mc.antonov_n_max},
          {"refine_boundaries", mc.refine_boundaries}};
}

Json MinimalStructure::to_json() const {
  Json comps = Json::array();
  for (const auto& a : components) {
    if (a.is_whole())
      comps.push_back({{"whole", true}});
    else
      comps.push_back({{"start", a.start().value()}, {"end", a.end().value()}, {"length", a.length()}});
  }
  return {{"whole_circle", whole_circle},
          {"components", comps},
          {"k", k},
          {"l", l},
          {"p", p},
          {"q", q},
          {"total_gap_measure", total_gap_measure},
          {"symmetry_order", symmetry_order},
          {"antonov_case", to_string(antonov_case)},
          {"notes", notes}};
}

std::vector<std::uint64_t> estimate_stationary_histogram(const RandomHomeoFamily& fam,
                                                         std::uint64_t seed, int n_burn,
                                                         std::int64_t n_samples, int n_bins,
                                                         Exec exec, int n_chains) {
  if (n_bins < 64) throw DomainError("n_bins must be at least 64");
  if (n_samples < 1 || n_burn < 0 || n_chains < 1) throw DomainError("invalid sampling parameters");
  const std::int64_t per_chain = (n_samples + n_chains - 1) / n_chains;
  return kernels::orbit_histogram(fam, seed, n_chains, n_burn, per_chain, n_bins, exec);
}

std::vector<Arc> histogram_components(const std::vector<std::uint64_t>& hist, int gap_min) {
  const int n = static_cast<int>(hist.size());
  std::vector<Arc> out;
  if (n == 0) return out;
  // find an occupied bin that directly follows an empty run of qualifying length
  std::vector<char> is_gap(static_cast<std::size_t>(n), 0);
  bool any_occupied = false;
  for (int b = 0; b < n; ++b) any_occupied |= hist[static_cast<std::size_t>(b)] > 0;
  if (!any_occupied) return out;
  for (int b = 0; b < n; ++b) {
    if (hist[static_cast<std::size_t>(b)] > 0) continue;
    // extent of the empty run through b
    int lo = b, hi = b;
    while (hist[static_cast<std::size_t>(((lo - 1) % n + n) % n)] == 0 && hi - lo + 1 < n) --lo;
    while (hist[static_cast<std::size_t>((hi + 1) % n)] == 0 && hi - lo + 1 < n) ++hi;
    if (hi - lo + 1 >= gap_min) is_gap[static_cast<std::size_t>(b)] = 1;
  }
  int start = -1;
  for (int b = 0; b < n; ++b)
    if (!is_gap[static_cast<std::size_t>(b)] && is_gap[static_cast<std::size_t>((b + n - 1) % n)]) {
      start = b;
      break;
    }
  if (start < 0) return out;  // no gap at all
  for (int step = 0; step < n; ++step) {
    const int b = (start + step) % n;
    if (is_gap[static_cast<std::size_t>(b)]) continue;
    if (!is_gap[static_cast<std::size_t>((b + n - 1) % n)]) continue;
    int e = b;
    while (!is_gap[static_cast<std::size_t>((e + 1) % n)]) e = (e + 1) % n;
    out.emplace_back(CirclePoint(static_cast<double>(b) / n), CirclePoint(static_cast<double>(e + 1) / n));
  }
  return out;
}

namespace {

std::vector<NoisePoint> envelope_alphas(const NoiseModel& noise) {
  auto a = noise.corners_and_centre();
  const int per_axis = noise.dimension() <= 2 ? 9 : 4;
  for (const auto& g : noise.grid(per_axis)) a.push_back(g);
  return a;
}

double lower_envelope(const RandomHomeoFamily& fam, const std::vector<NoisePoint>& alphas, double t) {
  double m = fam.lift(alphas[0], t);
  for (std::size_t i = 1; i < alphas.size(); ++i) m = std::min(m, fam.lift(alphas[i], t));
  return m;
}

double upper_envelope(const RandomHomeoFamily& fam, const std::vector<NoisePoint>& alphas, double t) {
  double m = fam.lift(alphas[0], t);
  for (std::size_t i = 1; i < alphas.size(); ++i) m = std::max(m, fam.lift(alphas[i], t));
  return m;
}

// Replace histogram edges by periodic orbits of the envelope maps, then make
// the lower (upper) edges forward sub- (super-) invariant in floating point.
void refine_boundaries(const RandomHomeoFamily& fam, MinimalStructure& s, double bin) {
  const auto alphas = envelope_alphas(fam.noise());
  const int k = s.k;
  const int period = s.q;
  const int steps = period * ((400 + period - 1) / period);
  std::vector<CirclePoint> lo(static_cast<std::size_t>(k)), hi(static_cast<std::size_t>(k));
  bool ok = true;
  for (int i = 0; i < k; ++i) {
    CirclePoint x = s.component(i).start();
    CirclePoint y = s.component(i).end();
    CirclePoint x_prev = x, y_prev = y;
    for (int t = 0; t < steps; ++t) {
      if (t == steps - period) {
        x_prev = x;
        y_prev = y;
      }
      x = CirclePoint(lower_envelope(fam, alphas, x.value()));
      y = CirclePoint(upper_envelope(fam, alphas, y.value()));
    }
    if (dist(x, x_prev) > 1e-12 || dist(y, y_prev) > 1e-12) ok = false;
    if (dist(x, s.component(i).start()) > 4 * bin || dist(y, s.component(i).end()) > 4 * bin) ok = false;
    lo[static_cast<std::size_t>(i)] = x;
    hi[static_cast<std::size_t>(i)] = y;
  }
  if (!ok) {
    s.notes.emplace_back("envelope refinement did not settle; histogram boundaries kept");
    return;
  }
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>((i + s.l) % k);
      const CirclePoint c_lo(lower_envelope(fam, alphas, lo[static_cast<std::size_t>(i)].value()));
      const double d_lo = dplus(c_lo, lo[j]);
      if (d_lo > 0.0 && d_lo < 1e-6) {
        lo[j] = c_lo;
        changed = true;
      }
      const CirclePoint c_hi(upper_envelope(fam, alphas, hi[static_cast<std::size_t>(i)].value()));
      const double d_hi = dplus(hi[j], c_hi);
      if (d_hi > 0.0 && d_hi < 1e-6) {
        hi[j] = c_hi;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (int i = 0; i < k; ++i)
    s.components[static_cast<std::size_t>(i)] = Arc(lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
}

// Union of arcs, joining neighbours closer than min_gap. Empty result: the
// union is (up to min_gap) the whole circle.
std::vector<Arc> merge_arcs(const std::vector<Arc>& arcs, double min_gap) {
  struct Iv {
    double s, e;
  };
  std::vector<Iv> iv;
  for (const auto& a : arcs) {
    if (a.is_whole() || a.length() + min_gap >= 1.0) return {};
    iv.push_back({a.start().value(), a.start().value() + a.length()});
  }
  std::sort(iv.begin(), iv.end(), [](const Iv& a, const Iv& b) { return a.s < b.s; });
  std::vector<Iv> m;
  for (const auto& x : iv) {
    if (!m.empty() && x.s - m.back().e < min_gap) m.back().e = std::max(m.back().e, x.e);
    else m.push_back(x);
  }
  while (m.size() > 1 && m.front().s + 1.0 - m.back().e < min_gap) {
    m.back().e = std::max(m.back().e, m.front().e + 1.0);
    m.erase(m.begin());
  }
  std::vector<Arc> out;
  for (const auto& x : m) {
    if (x.e - x.s + min_gap >= 1.0) return {};
    out.emplace_back(CirclePoint(x.s), CirclePoint(x.e));
  }
  return out;
}

// Grows the histogram support by its images under the envelope maps until
// the number of components settles. Sparse tails of the stationary measure
// leave spurious empty runs that some image covers; genuine gaps survive
// because the support is forward-invariant.
std::vector<Arc> close_under_images(const RandomHomeoFamily& fam, std::vector<Arc> arcs,
                                    double min_gap) {
  const auto alphas = envelope_alphas(fam.noise());
  for (int round = 0; round < 200 && !arcs.empty(); ++round) {
    std::vector<Arc> all = arcs;
    double grown = 0.0;
    for (const auto& a : arcs) {
      const double lo = lower_envelope(fam, alphas, a.start().value());
      const double hi = upper_envelope(fam, alphas, a.start().value() + a.length());
      if (hi - lo + min_gap >= 1.0) return {};
      all.emplace_back(CirclePoint(lo), CirclePoint(hi));
    }
    auto merged = merge_arcs(all, min_gap);
    if (merged.empty()) return merged;
    double before = 0.0, after = 0.0;
    for (const auto& a : arcs) before += a.length();
    for (const auto& a : merged) after += a.length();
    grown = after - before;
    const bool same_count = merged.size() == arcs.size();
    arcs = std::move(merged);
    if (same_count && grown < 1e-9) break;
  }
  return arcs;
}

std::vector<NoisePoint> check_alphas(const NoiseModel& noise, int n_alpha, std::uint64_t seed) {
  auto a = noise.corners_and_centre();
  for (int i = 0; i < n_alpha; ++i) a.push_back(noise.sample(seed, i));
  return a;
}

}  // namespace

MinimalStructure estimate_minimal_structure(const RandomHomeoFamily& fam, const McParams& mc) {
  if (mc.gap_min < 1) throw DomainError("gap_min must be positive");
  MinimalStructure s;
  const double bin = 1.0 / mc.n_bins;
  auto hist = estimate_stationary_histogram(fam, mc.seed, mc.n_burn, mc.n_samples, mc.n_bins, mc.exec,
                                            mc.n_chains);
  auto comps = histogram_components(hist, mc.gap_min);
  auto gap_measure = [&](const std::vector<Arc>& cs) {
    double covered = 0.0;
    for (const auto& a : cs) covered += a.length();
    return cs.empty() ? 0.0 : 1.0 - covered;
  };
  if (!comps.empty() && gap_measure(comps) < 4.0 * mc.gap_min / mc.n_bins) {
    s.notes.emplace_back("tiny total gap; histogram re-run with 4x samples");
    hist = estimate_stationary_histogram(fam, derive_seed(mc.seed, 4), mc.n_burn, 4 * mc.n_samples,
                                         mc.n_bins, mc.exec, mc.n_chains);
    comps = histogram_components(hist, mc.gap_min);
  }

  if (!comps.empty()) {
    const auto n_hist = comps.size();
    comps = close_under_images(fam, std::move(comps), mc.gap_min * bin);
    if (comps.size() != n_hist)
      s.notes.emplace_back("histogram components merged by closing the support under the envelope maps");
  }

  if (comps.empty()) {
    s.whole_circle = true;
    s.components = {Arc::whole()};
    s.k = 1;
    s.l = 0;
    s.p = 1;
    s.q = 1;
    s.total_gap_measure = 0.0;
    s.symmetry_order = detect_rotational_symmetry(fam, mc.m_max, 64, 16, mc.symmetry_tol);
    try {
      s.antonov_case = classify_antonov(fam, s, mc);
    } catch (const NumericError& e) {
      throw StructureError(std::string("trichotomy case inconclusive: ") + e.what());
    }
    return s;
  }

  // anticlockwise order by midpoint
  std::sort(comps.begin(), comps.end(),
            [](const Arc& a, const Arc& b) { return a.midpoint().value() < b.midpoint().value(); });
  s.components = comps;
  s.k = static_cast<int>(comps.size());
  s.total_gap_measure = gap_measure(comps);

  // rotation index from images of the component midpoints
  const auto alphas = check_alphas(fam.noise(), mc.n_alpha, derive_seed(mc.seed, 7));
  int l = -1;
  for (int i = 0; i < s.k; ++i) {
    const CirclePoint mid = s.component(i).midpoint();
    for (const auto& a : alphas) {
      const int j = s.component_of(fam.eval(a, mid), bin);
      if (j < 0)
        throw StructureError("image of component " + std::to_string(i) +
                             " misses every component; increase n_bins or n_samples");
      const int li = ((j - i) % s.k + s.k) % s.k;
      if (l < 0) l = li;
      if (li != l)
        throw StructureError("rotation index is inconsistent across noise samples (" + std::to_string(l) +
                             " vs " + std::to_string(li) + ")");
    }
  }
  s.l = l;
  s.p = std::gcd(s.k, s.l);  // gcd(k, 0) = k
  s.q = s.k / s.p;
  s.symmetry_order = 1;
  s.antonov_case = AntonovCase::not_minimal;
  if (mc.refine_boundaries) {
    refine_boundaries(fam, s, bin);
    s.total_gap_measure = gap_measure(s.components);
  }
  return s;
}

bool commutes_with(const RandomHomeoFamily& fam, const std::function<CirclePoint(CirclePoint)>& tau,
                   int grid, int n_alpha, double tol) {
  const auto alphas = check_alphas(fam.noise(), n_alpha, 0x5717);
  for (const auto& a : alphas)
    for (int j = 0; j < grid; ++j) {
      const CirclePoint x((j + 0.3183) / grid);
      if (dist(fam.eval(a, tau(x)), tau(fam.eval(a, x))) >= tol) return false;
    }
  return true;
}

int detect_rotational_symmetry(const RandomHomeoFamily& fam, int m_max, int grid, int n_alpha,
                               double tol) {
  if (m_max < 2) throw DomainError("m_max must be at least 2");
  std::vector<char> passes(static_cast<std::size_t>(m_max + 1), 0);
  passes[1] = 1;
  for (int m = 2; m <= m_max; ++m) {
    const CirclePoint step(1.0 / m);
    passes[static_cast<std::size_t>(m)] =
        commutes_with(fam, [step](CirclePoint x) { return x + step; }, grid, n_alpha, tol);
  }
  for (int m = m_max; m >= 2; --m) {
    bool ok = true;
    for (int d = 2; d <= m && ok; ++d)
      if (m % d == 0 && !passes[static_cast<std::size_t>(d)]) ok = false;
    if (ok) return m;
  }
  return 1;
}

bool is_random_rotation(const RandomHomeoFamily& fam, int grid, int n_alpha, double tol) {
  const auto alphas = check_alphas(fam.noise(), n_alpha, 0x7071);
  for (const auto& a : alphas) {
    const double s0 = fam.lift(a, 0.0);
    for (int j = 1; j < grid; ++j) {
      const double t = static_cast<double>(j) / grid;
      if (std::abs(wrap_signed(fam.lift(a, t) - t - s0)) >= tol) return false;
    }
  }
  return true;
}

AntonovCase classify_antonov(const RandomHomeoFamily& fam, const MinimalStructure& s, const McParams& mc) {
  if (!s.whole_circle) throw PreconditionError("trichotomy applies to minimal (whole-circle) families only");
  if (is_random_rotation(fam)) return AntonovCase::rotation;
  const int m = s.symmetry_order;
  const RandomHomeoFamily lifted = m >= 2 ? factor(fam, m) : fam;
  for (int w = 0; w < mc.antonov_windows; ++w) {
    const auto window = NoiseWindow::generate(fam.noise(), derive_seed(mc.seed, 0xA000 + w), mc.antonov_n_max, 0);
    const auto rep = pullback_grid_clusters(lifted, window, 64, mc.antonov_n_max, mc.exec);
    if (rep.centers.size() != 1 || rep.max_diameter > 1e-6)
      throw NumericError("factor did not collapse to a single cluster within " +
                         std::to_string(mc.antonov_n_max) + " steps (" + std::to_string(rep.centers.size()) +
                         " clusters); window too short or family near-rotational");
  }
  return m >= 2 ? AntonovCase::symmetric_lift_contractive : AntonovCase::contractive;
}

void write_histogram_csv(std::ostream& os, const std::vector<std::uint64_t>& hist) {
  os << "bin,left,count\n";
  const double n = static_cast<double>(hist.size());
  for (std::size_t b = 0; b < hist.size(); ++b)
    os << b << ',' << fmt17(static_cast<double>(b) / n) << ',' << hist[b] << '\n';
}

}  // namespace rds
