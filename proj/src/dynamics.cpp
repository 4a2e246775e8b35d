#include "rds/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "rds/error.hpp"
#include "rds/io.hpp"

namespace rds {

CirclePoint cocycle(const RandomHomeoFamily& fam, const NoiseWindow& window, int n, CirclePoint x) {
  if (n > 0) {
    (void)window.at(n - 1);
    for (int i = 0; i < n; ++i) x = fam.eval(window.at(i), x);
  } else if (n < 0) {
    (void)window.at(n);
    for (int i = -1; i >= n; --i) x = fam.eval_inverse(window.at(i), x);
  }
  return x;
}

CirclePoint PullbackSequence::term(int n) const {
  if (n < 0) throw IndexError("negative pullback term index");
  if (terms.empty()) throw IndexError("empty pullback sequence");
  if (static_cast<std::size_t>(n) < terms.size()) return terms[static_cast<std::size_t>(n)];
  return limit;
}

namespace {

void finish_sequence(PullbackSequence& seq, const PullbackOptions& opt) {
  seq.limit = seq.terms.back();
  seq.gap = 1.0;
  seq.converged = false;
  for (std::size_t n = seq.terms.size(); n-- > 1;) {
    if (!(seq.terms[n] == seq.terms[n - 1])) {
      seq.gap = dist(seq.terms[n], seq.terms[n - 1]);
      break;
    }
    if (n == 1) seq.gap = 0.0;  // every term identical
  }
  if (seq.terms.size() > 1) seq.converged = seq.gap < opt.tol;
  if (!opt.order || !seq.converged) return;
  for (std::size_t n = 0; n + 1 < seq.terms.size(); ++n) {
    const CirclePoint cur = seq.terms[n];
    const CirclePoint next = seq.terms[n + 1];
    const Arc arc = (*opt.order == ArcOrder::increasing) ? Arc(cur, seq.limit) : Arc(seq.limit, cur);
    if (arc.contains(next)) continue;
    if (std::min(dist(next, cur), dist(next, seq.limit)) <= opt.order_tol) continue;
    throw NumericError("pullback terms are not monotone at n = " + std::to_string(n + 1) +
                       " (anchor data is not invariant)");
  }
}

bool saturated(const std::vector<CirclePoint>& terms, int repeats) {
  if (repeats <= 0 || terms.size() < static_cast<std::size_t>(repeats) + 1) return false;
  const CirclePoint last = terms.back();
  for (int j = 1; j <= repeats; ++j)
    if (!(terms[terms.size() - 1 - static_cast<std::size_t>(j)] == last)) return false;
  return true;
}

}  // namespace

PullbackSequence pullback_forward(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                  const IndexedPoint& x_of_index, int n_max,
                                  const PullbackOptions& opt) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  if (n_max > 0) (void)window.at(-n_max);
  PullbackSequence seq;
  seq.anchor_index = opt.anchor_index;
  seq.kind = PullbackKind::forward;
  for (int n = 0; n <= n_max; ++n) {
    CirclePoint x = x_of_index(-n);
    for (int i = -n; i < 0; ++i) x = fam.eval(window.at(i), x);
    seq.terms.push_back(x);
    if (saturated(seq.terms, opt.saturation_repeats)) break;
  }
  finish_sequence(seq, opt);
  return seq;
}

PullbackSequence pullback_backward(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                   const IndexedPoint& x_of_index, int n_max,
                                   const PullbackOptions& opt) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  if (n_max > 0) (void)window.at(n_max - 1);
  PullbackSequence seq;
  seq.anchor_index = opt.anchor_index;
  seq.kind = PullbackKind::backward;
  for (int n = 0; n <= n_max; ++n) {
    CirclePoint x = x_of_index(n);
    for (int i = n - 1; i >= 0; --i) x = fam.eval_inverse(window.at(i), x);
    seq.terms.push_back(x);
    if (saturated(seq.terms, opt.saturation_repeats)) break;
  }
  finish_sequence(seq, opt);
  return seq;
}

ClusterReport cluster_points(std::vector<CirclePoint> points, double gap_threshold) {
  ClusterReport rep;
  rep.images = points;
  if (points.empty()) return rep;
  std::sort(points.begin(), points.end(),
            [](CirclePoint a, CirclePoint b) { return a.value() < b.value(); });
  const std::size_t n = points.size();
  // gap[j] is the gap after points[j]
  std::vector<double> gap(n);
  for (std::size_t j = 0; j + 1 < n; ++j) gap[j] = points[j + 1].value() - points[j].value();
  gap[n - 1] = 1.0 - points[n - 1].value() + points[0].value();
  if (n == 1) gap[0] = 1.0;
  const auto largest = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
  rep.image_spread = 1.0 - gap[largest];

  std::vector<std::size_t> breaks;
  for (std::size_t j = 0; j < n; ++j)
    if (gap[j] >= gap_threshold) breaks.push_back(j);
  if (breaks.empty()) breaks.push_back(largest);  // one cluster, cut at its widest gap

  for (std::size_t b = 0; b < breaks.size(); ++b) {
    const std::size_t first = (breaks[b] + 1) % n;
    const std::size_t last = breaks[(b + 1) % breaks.size()];
    const CirclePoint s = points[first];
    const CirclePoint e = points[last];
    const int size = static_cast<int>((last + n - first) % n) + 1;
    rep.centers.push_back(arc_midpoint(s, e));
    rep.diameters.push_back(dplus(s, e));
    rep.sizes.push_back(size);
  }
  // anticlockwise order from 0
  std::vector<std::size_t> idx(rep.centers.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return rep.centers[a].value() < rep.centers[b].value(); });
  ClusterReport sorted = rep;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sorted.centers[i] = rep.centers[idx[i]];
    sorted.diameters[i] = rep.diameters[idx[i]];
    sorted.sizes[i] = rep.sizes[idx[i]];
  }
  sorted.max_diameter = *std::max_element(sorted.diameters.begin(), sorted.diameters.end());
  return sorted;
}

namespace {

std::vector<CirclePoint> uniform_grid(int n) {
  std::vector<CirclePoint> g;
  g.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) g.emplace_back(static_cast<double>(j) / n);
  return g;
}

}  // namespace

ClusterReport pullback_grid_clusters(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                     int grid_size, int n_max, Exec exec) {
  if (grid_size < 8) throw DomainError("grid_size must be at least 8");
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  auto images = kernels::push_points(fam, window, uniform_grid(grid_size), -n_max, 0, exec);
  return cluster_points(std::move(images), 1.0 / (4.0 * grid_size));
}

ClusterReport pushback_grid_clusters(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                     int grid_size, int n_max, Exec exec) {
  if (grid_size < 8) throw DomainError("grid_size must be at least 8");
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  auto images = kernels::push_points(fam, window, uniform_grid(grid_size), n_max, 0, exec);
  return cluster_points(std::move(images), 1.0 / (4.0 * grid_size));
}

double contraction_rate(const RandomHomeoFamily& fam, const NoiseWindow& window, int n_max,
                        double exclusion_radius) {
  if (n_max < 2) throw DomainError("contraction_rate needs n_max >= 2");
  if (!(exclusion_radius > 0.0 && exclusion_radius < 0.5))
    throw DomainError("exclusion radius must lie in (0, 1/2)");
  (void)window.at(n_max - 1);
  // repeller estimate: the most populated cluster of the backward grid image
  const auto back = pushback_grid_clusters(fam, window, 64, window.end_index());
  std::size_t best = 0;
  for (std::size_t c = 1; c < back.sizes.size(); ++c)
    if (back.sizes[c] > back.sizes[best]) best = c;
  const CirclePoint r = back.centers[best];

  CirclePoint s = r + CirclePoint(exclusion_radius);
  CirclePoint e = r - CirclePoint(exclusion_radius);
  std::vector<double> ns, logs;
  double prev = dplus(s, e);
  ns.push_back(0.0);
  logs.push_back(std::log(prev));
  for (int n = 0; n < n_max; ++n) {
    s = fam.eval(window.at(n), s);
    e = fam.eval(window.at(n), e);
    double len = dplus(s, e);
    if (len > prev + 0.5) len = 0.0;  // endpoints crossed by rounding
    if (len < 1e-15) {
      ns.push_back(n + 1.0);
      logs.push_back(std::log(1e-15));
      break;
    }
    ns.push_back(n + 1.0);
    logs.push_back(std::log(len));
    prev = len;
  }
  const auto m = static_cast<double>(ns.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sx += ns[i];
    sy += logs[i];
    sxx += ns[i] * ns[i];
    sxy += ns[i] * logs[i];
  }
  const double den = m * sxx - sx * sx;
  return den > 0 ? (m * sxy - sx * sy) / den : 0.0;
}

std::vector<int> genericity_set(const std::vector<CircleMap>& maps,
                                const std::vector<CirclePoint>& xs, double tol) {
  if (xs.empty() || maps.size() + 1 != xs.size())
    throw DomainError("perturbation needs maps.size() == xs.size() - 1");
  std::vector<int> p;
  for (std::size_t n = 0; n + 1 < xs.size(); ++n)
    if (dist(maps[n](xs[n]), xs[n + 1]) > tol) p.push_back(static_cast<int>(n));
  return p;
}

std::vector<CirclePoint> perturb_sequence(const std::vector<CircleMap>& maps,
                                          const std::vector<CirclePoint>& xs, ArcOrder direction,
                                          double genericity_tol,
                                          const std::vector<CirclePoint>* orbit) {
  std::vector<char> generic(xs.empty() ? 0 : xs.size() - 1, 0);
  for (int n : genericity_set(maps, xs, genericity_tol)) generic[static_cast<std::size_t>(n)] = 1;
  return perturb_sequence(maps, xs, direction, generic, orbit);
}

std::vector<CirclePoint> perturb_sequence(const std::vector<CircleMap>& maps,
                                          const std::vector<CirclePoint>& xs, ArcOrder direction,
                                          const std::vector<char>& generic,
                                          const std::vector<CirclePoint>* orbit) {
  if (xs.empty() || maps.size() + 1 != xs.size() || generic.size() != maps.size())
    throw DomainError("perturbation needs maps.size() == generic.size() == xs.size() - 1");
  if (xs.size() > 1 && std::none_of(generic.begin(), generic.end(), [](char g) { return g != 0; }))
    throw PreconditionError("sequence is not generic: every step maps x_n exactly onto x_(n+1)");
  if (orbit && orbit->size() != xs.size()) throw DomainError("orbit length must match xs");

  std::vector<char> in_p(xs.size(), 0);
  in_p[0] = 1;
  in_p.back() = 1;
  for (std::size_t n = 0; n < generic.size(); ++n)
    if (generic[n]) in_p[n] = 1;

  std::vector<CirclePoint> ys(xs.size());
  ys[0] = xs[0];
  for (std::size_t n = 1; n < xs.size(); ++n) {
    if (orbit) {
      const CirclePoint prev_image = maps[n - 1](xs[n - 1]);
      const CirclePoint a = (*orbit)[n];
      const bool ok = direction == ArcOrder::increasing
                          ? Arc(xs[n], a).contains_closed_open(prev_image)
                          : Arc(a, xs[n]).contains_open_closed(prev_image);
      const bool near = !generic[n - 1];
      if (!ok && !near)
        throw PreconditionError("perturbation hypothesis fails at index " + std::to_string(n) +
                                ": image of the previous term is not between x_n and the orbit");
    }
    if (in_p[n]) {
      ys[n] = xs[n];
      continue;
    }
    const CirclePoint img = maps[n - 1](ys[n - 1]);
    const double ahead = direction == ArcOrder::increasing ? dplus(xs[n], img) : dplus(img, xs[n]);
    // Once the gap has contracted below rounding the image can land on or just
    // behind x_n; no double lies strictly between, so keep x_n.
    if (ahead == 0.0 || ahead > 0.5) {
      ys[n] = xs[n];
      continue;
    }
    ys[n] = direction == ArcOrder::increasing ? arc_midpoint(xs[n], img) : arc_midpoint(img, xs[n]);
  }
  return ys;
}

void write_pullback_csv(std::ostream& os, const PullbackSequence& seq) {
  os << "n,value,gap\n";
  for (std::size_t n = 0; n < seq.terms.size(); ++n) {
    const double g = n == 0 ? 0.0 : dist(seq.terms[n], seq.terms[n - 1]);
    os << n << ',' << fmt17(seq.terms[n].value()) << ',' << fmt17(g) << '\n';
  }
}

void write_cluster_csv(std::ostream& os, const ClusterReport& rep) {
  os << "cluster,center,diameter,size\n";
  for (std::size_t c = 0; c < rep.centers.size(); ++c)
    os << c << ',' << fmt17(rep.centers[c].value()) << ',' << fmt17(rep.diameters[c]) << ','
       << rep.sizes[c] << '\n';
}

}  // namespace rds
