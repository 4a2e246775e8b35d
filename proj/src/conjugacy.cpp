#include "rds/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rds/error.hpp"
#include "rds/io.hpp"

namespace rds {

namespace {

int mod(int a, int k) { return ((a % k) + k) % k; }

CirclePoint push(const RandomHomeoFamily& fam, const NoiseWindow& w, CirclePoint x, int from, int to) {
  if (to >= from) {
    for (int i = from; i < to; ++i) x = fam.eval(w.at(i), x);
  } else {
    for (int i = from - 1; i >= to; --i) x = fam.eval_inverse(w.at(i), x);
  }
  return x;
}

// Grid point whose image lies in the most populated cluster.
CirclePoint dominant_point(const ClusterReport& rep, int grid) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < rep.sizes.size(); ++c)
    if (rep.sizes[c] > rep.sizes[best]) best = c;
  const CirclePoint centre = rep.centers[best];
  int idx = 0;
  double dmin = 2.0;
  for (int i = 0; i < grid; ++i) {
    const double d = dist(rep.images[static_cast<std::size_t>(i)], centre);
    if (d < dmin) {
      dmin = d;
      idx = i;
    }
  }
  return CirclePoint(static_cast<double>(idx) / grid);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

// ---- PiecewiseCircleMap ----------------------------------------------------

PiecewiseCircleMap::PiecewiseCircleMap(std::vector<std::pair<CirclePoint, CirclePoint>> nodes) {
  if (nodes.size() < 2) throw ConjugacyError("a piecewise circle map needs at least two nodes");
  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a.first.value() < b.first.value(); });
  xs_.reserve(nodes.size());
  ys_.reserve(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double x = nodes[j].first.value();
    if (j > 0 && !(x > xs_.back()))
      throw ConjugacyError("node x-values are not distinct");
    xs_.push_back(x);
    if (j == 0) {
      ys_.push_back(nodes[0].second.value());
    } else {
      const double step = dplus(nodes[j - 1].second, nodes[j].second);
      if (!(step > 0.0))
        throw ConjugacyError("node y-values are not strictly increasing at x = " + fmt17(x) +
                             " (y " + fmt17(nodes[j - 1].second.value()) + " -> " +
                             fmt17(nodes[j].second.value()) + ")");
      ys_.push_back(ys_.back() + step);
    }
  }
  const double closing = dplus(nodes.back().second, nodes.front().second);
  const double winding = ys_.back() - ys_.front() + closing;
  if (!(closing > 0.0) || std::abs(winding - 1.0) > 1e-9)
    throw ConjugacyError("node y-values wind more than once around the circle");
}

PiecewiseCircleMap PiecewiseCircleMap::identity() {
  return PiecewiseCircleMap({{CirclePoint(0.0), CirclePoint(0.0)}, {CirclePoint(0.5), CirclePoint(0.5)}});
}

namespace {

// Linear interpolation on a strictly increasing table closed up by period one.
double interp_periodic(const std::vector<double>& from, const std::vector<double>& to, double t) {
  const double lo = from.front();
  const double hi = from.back();
  if (t < lo || t >= hi) {
    const double t0 = hi;
    const double t1 = lo + 1.0;
    const double tt = t < lo ? t + 1.0 : t;
    const double s = (tt - t0) / (t1 - t0);
    return to.back() + s * (to.front() + 1.0 - to.back());
  }
  const auto it = std::upper_bound(from.begin(), from.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - from.begin());
  const double s = (t - from[j - 1]) / (from[j] - from[j - 1]);
  return to[j - 1] + s * (to[j] - to[j - 1]);
}

}  // namespace

CirclePoint PiecewiseCircleMap::operator()(CirclePoint x) const {
  return CirclePoint(interp_periodic(xs_, ys_, x.value()));
}

CirclePoint PiecewiseCircleMap::inverse(CirclePoint y) const {
  const double t = ys_.front() + dplus(CirclePoint(ys_.front()), y);
  return CirclePoint(interp_periodic(ys_, xs_, t));
}

std::vector<std::pair<CirclePoint, CirclePoint>> PiecewiseCircleMap::nodes() const {
  std::vector<std::pair<CirclePoint, CirclePoint>> out;
  out.reserve(xs_.size());
  for (std::size_t j = 0; j < xs_.size(); ++j) out.emplace_back(CirclePoint(xs_[j]), CirclePoint(ys_[j]));
  return out;
}

CirclePoint SignedCircleMap::operator()(CirclePoint x) const {
  return orientation > 0 ? increasing(x) : -increasing(x);
}

CirclePoint SignedCircleMap::inverse(CirclePoint y) const {
  return increasing.inverse(orientation > 0 ? y : -y);
}

void write_nodes_csv(std::ostream& os, const PiecewiseCircleMap& h) {
  os << "x,y\n";
  for (std::size_t j = 0; j < h.size(); ++j)
    os << fmt17(h.x_nodes()[j]) << ',' << fmt17(h.y_lift()[j]) << '\n';
}

// ---- anchors ---------------------------------------------------------------

int AnchorSet::base_of(int component, int time) const { return mod(component - time * l, k); }

CirclePoint AnchorSet::at(const std::vector<std::vector<CirclePoint>>& seq, int b, int t) const {
  if (t < t_begin || t >= t_end) throw IndexError("anchor time outside the window");
  return seq[static_cast<std::size_t>(b)][static_cast<std::size_t>(t - t_begin)];
}

CirclePoint AnchorSet::a(int component, int time) const { return at(attractor, mod(component, k), time); }

CirclePoint AnchorSet::r(int component, int time) const { return at(repeller, mod(component, k), time); }

std::pair<double, double> probe_epsilons(const RandomHomeoFamily& fam, const AnchorParams& p) {
  std::vector<double> du, dv;
  for (int j = 0; j < p.probe_windows; ++j) {
    const auto w = NoiseWindow::generate(fam.noise(), derive_seed(p.probe_seed, static_cast<std::uint64_t>(j)),
                                         p.probe_half_width);
    const int g = p.track_grid;
    const auto ca = pullback_grid_clusters(fam, w, g, p.probe_half_width, p.exec);
    const auto cr = pushback_grid_clusters(fam, w, g, p.probe_half_width, p.exec);
    auto largest = [](const ClusterReport& rep) {
      std::size_t b = 0;
      for (std::size_t c = 1; c < rep.sizes.size(); ++c)
        if (rep.sizes[c] > rep.sizes[b]) b = c;
      return rep.centers[b];
    };
    const CirclePoint a0 = largest(ca), r0 = largest(cr);
    du.push_back(dplus(r0, a0));
    dv.push_back(dplus(a0, r0));
  }
  return {0.5 * median(du), 0.5 * median(dv)};
}

AnchorSet anchor_sequences(const RandomHomeoFamily& fam, const MinimalStructure& s,
                           const NoiseWindow& window, int n_max, const AnchorParams& p) {
  if (fam.traits().target_only) throw PreconditionError("canonical families are conjugacy targets only");
  AnchorSet A;
  A.t_begin = window.begin_index();
  A.t_end = window.end_index();
  if (A.t_begin > -2 * n_max - 1 || A.t_end < 2 * n_max + 2)
    throw ConjugacyError("window [" + std::to_string(A.t_begin) + ", " + std::to_string(A.t_end) +
                         ") is too short for " + std::to_string(n_max) +
                         " pullback steps (half-width must be at least " + std::to_string(2 * n_max + 2) +
                         "); increase n_max");
  const int span = A.t_end - A.t_begin;
  const int burn = span / 4;
  A.a_valid_from = A.t_begin + burn;
  A.r_valid_to = A.t_end - burn;

  if (s.whole_circle) {
    if (s.antonov_case != AntonovCase::contractive)
      throw PreconditionError("a minimal family with a symmetry is not conjugate to a canonical model");
    A.k = 1;
    A.l = 0;
    A.contractive_case = true;
  } else {
    A.k = s.k;
    A.l = s.l;
  }
  const int k = A.k;
  const int l = A.l;
  const auto sz = static_cast<std::size_t>(span);
  A.attractor.assign(static_cast<std::size_t>(k), std::vector<CirclePoint>(sz));
  A.repeller.assign(static_cast<std::size_t>(k), std::vector<CirclePoint>(sz));

  // Attractor and repeller orbits.
  std::vector<CirclePoint> a_start(static_cast<std::size_t>(k)), r_start(static_cast<std::size_t>(k));
  if (A.contractive_case) {
    const int g = p.track_grid;
    a_start[0] = dominant_point(pullback_grid_clusters(fam, window.shifted(A.t_begin + burn), g, burn, p.exec), g);
    r_start[0] = dominant_point(pushback_grid_clusters(fam, window.shifted(A.t_end - burn), g, burn, p.exec), g);
  } else {
    for (int c = 0; c < k; ++c) {
      a_start[static_cast<std::size_t>(c)] = s.component(c).midpoint();
      r_start[static_cast<std::size_t>(c)] = s.gap(c).midpoint();
    }
  }
  for (int c0 = 0; c0 < k; ++c0) {
    CirclePoint x = a_start[static_cast<std::size_t>(c0)];
    for (int t = A.t_begin; t < A.t_end; ++t) {
      A.attractor[static_cast<std::size_t>(mod(c0 + (t - A.t_begin) * l, k))][static_cast<std::size_t>(t - A.t_begin)] = x;
      x = fam.eval(window.at(t), x);
    }
    CirclePoint y = r_start[static_cast<std::size_t>(c0)];
    for (int t = A.t_end - 1; t >= A.t_begin; --t) {
      y = fam.eval_inverse(window.at(t), y);
      A.repeller[static_cast<std::size_t>(mod(c0 - (A.t_end - t) * l, k))][static_cast<std::size_t>(t - A.t_begin)] = y;
    }
  }

  // Raw sequences.
  A.u_raw.assign(static_cast<std::size_t>(k), std::vector<CirclePoint>(sz));
  A.v_raw.assign(static_cast<std::size_t>(k), std::vector<CirclePoint>(sz));
  if (A.contractive_case) {
    const auto eps = p.epsilons ? *p.epsilons : probe_epsilons(fam, p);
    A.epsilon_u = eps.first;
    A.epsilon_v = eps.second;
    if (!(A.epsilon_u > 0.0) || !(A.epsilon_v > 0.0))
      throw ConjugacyError("attractor and repeller estimates coincide; cannot place anchors");

    auto& u = A.u_raw[0];
    auto& v = A.v_raw[0];
    A.u_pulled.assign(1, std::vector<char>(sz, 0));
    A.v_pulled.assign(1, std::vector<char>(sz, 0));
    const auto last = static_cast<std::size_t>(span - 1);
    u[last] = A.attractor[0][last] - CirclePoint(A.epsilon_u);
    v[last] = A.attractor[0][last] + CirclePoint(A.epsilon_v);
    for (int t = A.t_end - 2; t >= A.t_begin; --t) {
      const auto i = static_cast<std::size_t>(t - A.t_begin);
      const CirclePoint a = A.attractor[0][i];
      const CirclePoint cu = a - CirclePoint(A.epsilon_u);
      const CirclePoint pu = fam.eval_inverse(window.at(t), u[i + 1]);
      A.u_pulled[0][i] = dplus(pu, a) < dplus(cu, a);
      u[i] = A.u_pulled[0][i] ? pu : cu;
      const CirclePoint cv = a + CirclePoint(A.epsilon_v);
      const CirclePoint pv = fam.eval_inverse(window.at(t), v[i + 1]);
      A.v_pulled[0][i] = dplus(a, pv) < dplus(a, cv);
      v[i] = A.v_pulled[0][i] ? pv : cv;
    }
  } else {
    for (int b = 0; b < k; ++b)
      for (int t = A.t_begin; t < A.t_end; ++t) {
        const Arc& g = s.component(b + t * l);
        A.u_raw[static_cast<std::size_t>(b)][static_cast<std::size_t>(t - A.t_begin)] = g.start();
        A.v_raw[static_cast<std::size_t>(b)][static_cast<std::size_t>(t - A.t_begin)] = g.end();
      }
  }

  // Perturbation.
  std::vector<CircleMap> maps;
  maps.reserve(sz - 1);
  for (int t = A.t_begin; t < A.t_end - 1; ++t) {
    const NoisePoint alpha = window.at(t);
    maps.emplace_back([&fam, alpha](CirclePoint x) { return fam.eval(alpha, x); });
  }
  A.u.resize(static_cast<std::size_t>(k));
  A.v.resize(static_cast<std::size_t>(k));
  try {
    if (A.contractive_case) {
      // ties are known from the construction; a tolerance test would misread
      // the rounding of ill-conditioned preimages
      auto generic = [&](const std::vector<char>& pulled) {
        std::vector<char> g(sz - 1);
        for (std::size_t i = 0; i + 1 < sz; ++i) g[i] = !pulled[i];
        return g;
      };
      A.u[0] = perturb_sequence(maps, A.u_raw[0], ArcOrder::increasing, generic(A.u_pulled[0]));
      A.v[0] = perturb_sequence(maps, A.v_raw[0], ArcOrder::decreasing, generic(A.v_pulled[0]));
    } else {
      for (int b = 0; b < k; ++b) {
        A.u[static_cast<std::size_t>(b)] =
            perturb_sequence(maps, A.u_raw[static_cast<std::size_t>(b)], ArcOrder::increasing, p.genericity_tol);
        A.v[static_cast<std::size_t>(b)] =
            perturb_sequence(maps, A.v_raw[static_cast<std::size_t>(b)], ArcOrder::decreasing, p.genericity_tol);
      }
    }
  } catch (const PreconditionError& e) {
    throw ConjugacyError(std::string("anchor sequence is degenerate (the family violates the "
                                     "non-degeneracy hypothesis on this window): ") + e.what());
  }
  return A;
}

TwoSidedTerms anchor_terms(const RandomHomeoFamily& fam, const NoiseWindow& window,
                           const AnchorSet& A, Side side, int component, int time, int n_max, bool raw) {
  const auto& seq = side == Side::u ? (raw ? A.u_raw : A.u) : (raw ? A.v_raw : A.v);
  const int b = A.base_of(component, time);
  TwoSidedTerms out;
  const auto* pulled = raw && A.contractive_case ? (side == Side::u ? &A.u_pulled : &A.v_pulled) : nullptr;
  for (int n = 0; n <= n_max && time - n >= A.t_begin; ++n) {
    // a pulled anchor is the exact preimage of the next one, so its image is
    // the next term itself, without a rounded round trip
    if (pulled && n > 0 && (*pulled)[0][static_cast<std::size_t>(time - n - A.t_begin)]) {
      out.forward.push_back(out.forward.back());
      continue;
    }
    out.forward.push_back(push(fam, window, A.at(seq, b, time - n), time - n, time));
  }
  for (int n = 0; n <= n_max && time + n < A.t_end; ++n)
    out.backward.push_back(push(fam, window, A.at(seq, b, time + n), time + n, time));
  return out;
}

// ---- assembly --------------------------------------------------------------

namespace {

struct Node {
  double x;  // anticlockwise offset from the left repeller
  double y;  // lifted target value
  bool pinned = false;
  CirclePoint at;  // the point itself; offsets do not round-trip exactly
};

struct Assembler {
  const RandomHomeoFamily& fam;
  const NoiseWindow& window;
  const AnchorSet& A;
  int s;
  const ConjugacyParams& p;
  RandomHomeoFamily g0;
  RandomHomeoFamily gl;
  NoisePoint dummy{0.0};

  double g0_iter(double y, int n) const {
    for (int i = 0; i < n; ++i) y = g0.lift(dummy, y);
    for (int i = 0; i > n; --i) y = g0.inverse_lift(dummy, y);
    return y;
  }
  double gl_iter(double y, int n) const {
    for (int i = 0; i < n; ++i) y = gl.lift(dummy, y);
    for (int i = 0; i > n; --i) y = gl.inverse_lift(dummy, y);
    return y;
  }

  // One side (u or v) of component c: nodes on both pullback directions and
  // interior nodes of every interval whose endpoints were kept.
  void side_nodes(Side side, int c, CirclePoint origin, double x_lo, double x_hi, double y_lo,
                  double y_hi, std::vector<Node>& out) const {
    const int k = A.k;
    const bool up = side == Side::u;  // u-terms increase towards the attractor
    const auto terms = anchor_terms(fam, window, A, side, c, s, p.n_h);
    const double y_base = up ? (4.0 * c + 1.0) / (4.0 * k) : (4.0 * c + 3.0) / (4.0 * k);
    auto X = [&](CirclePoint x) { return dplus(origin, x); };
    // Limit of the forward terms is the attractor side, of the backward ones
    // the repeller side. For u: forward -> x_hi (a), backward -> x_lo (r).
    const double fx_lim = up ? x_hi : x_lo;
    const double bx_lim = up ? x_lo : x_hi;
    const double fy_lim = up ? y_hi : y_lo;
    const double by_lim = up ? y_lo : y_hi;
    auto between = [](double v, double a, double b) { return a < b ? (v > a && v < b) : (v < a && v > b); };

    std::vector<Node> fwd, bwd;  // fwd[0] = bwd[0] = node 0
    const Node n0{X(terms.forward[0]), y_base, false, terms.forward[0]};
    if (!between(n0.x, x_lo, x_hi))
      throw ConjugacyError("anchor lies outside its component; increase n_max");
    fwd.push_back(n0);
    bwd.push_back(n0);
    for (std::size_t n = 1; n < terms.forward.size(); ++n) {
      const Node nd{X(terms.forward[n]), g0_iter(y_base, static_cast<int>(n)), false, terms.forward[n]};
      if (!between(nd.x, fwd.back().x, fx_lim) || !between(nd.y, fwd.back().y, fy_lim)) break;
      fwd.push_back(nd);
    }
    for (std::size_t n = 1; n < terms.backward.size(); ++n) {
      const Node nd{X(terms.backward[n]), g0_iter(y_base, -static_cast<int>(n)), false, terms.backward[n]};
      if (!between(nd.x, bwd.back().x, bx_lim) || !between(nd.y, bwd.back().y, by_lim)) break;
      bwd.push_back(nd);
    }

    // Interior of interval n (between terms n and n + 1), n in [-nb, nf - 1].
    const int nf = static_cast<int>(fwd.size()) - 1;
    const int nb = static_cast<int>(bwd.size()) - 1;
    const auto& seq = up ? A.u : A.v;
    const int b = A.base_of(c, s);
    for (int n = -nb; n < nf; ++n) {
      const Node& e0 = n >= 0 ? fwd[static_cast<std::size_t>(n)] : bwd[static_cast<std::size_t>(-n)];
      const Node& e1 = n + 1 >= 0 ? fwd[static_cast<std::size_t>(n + 1)] : bwd[static_cast<std::size_t>(-(n + 1))];
      const int t = s - n;
      if (t - 1 < A.t_begin || t >= A.t_end) continue;
      const int cc = mod(c - n * A.l, k);
      const CirclePoint P = A.at(seq, b, t);
      const CirclePoint Q = fam.eval(window.at(t - 1), A.at(seq, b, t - 1));
      const double y0 = up ? (4.0 * cc + 1.0) / (4.0 * k) : (4.0 * cc + 3.0) / (4.0 * k);
      const double y1 = g0.lift(dummy, y0);
      // Interval runs from P (term 0) to Q (term 1) in the base chart.
      const double len = up ? dplus(P, Q) : dplus(Q, P);
      Node last = e0;
      for (int j = 1; j <= p.interior; ++j) {
        const double f = static_cast<double>(j) / (p.interior + 1);
        const CirclePoint px = up ? CirclePoint(P.value() + f * len) : CirclePoint(P.value() - f * len);
        const double py = y0 + f * (y1 - y0);
        const CirclePoint xs = push(fam, window, px, t, s);
        const CirclePoint ys(gl_iter(py, n));
        const Node nd{X(xs), static_cast<double>(c) / k + dplus(CirclePoint(static_cast<double>(c) / k), ys), false,
                      xs};
        if (between(nd.x, last.x, e1.x) && between(nd.y, last.y, e1.y)) {
          out.push_back(nd);
          last = nd;
        }
      }
    }
    out.insert(out.end(), fwd.begin(), fwd.end());
    out.insert(out.end(), bwd.begin() + 1, bwd.end());
  }
};

}  // namespace

PiecewiseCircleMap assemble_conjugacy(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                      const AnchorSet& A, int shift, const ConjugacyParams& params) {
  const ConjugacyParams p = resolve_params(params, window);
  const int k = A.k;
  Assembler as{fam, window, A, shift, p, canonical(k, 0), canonical(k, A.l)};
  std::vector<std::pair<CirclePoint, CirclePoint>> nodes;
  for (int c = 0; c < k; ++c) {
    const CirclePoint r_prev = A.r(c - 1, shift);
    const CirclePoint r_next = A.r(c, shift);
    const CirclePoint a = A.a(c, shift);
    const double width = k == 1 ? 1.0 : dplus(r_prev, r_next);
    const double xa = dplus(r_prev, a);
    if (!(xa > 0.0 && xa < width))
      throw ConjugacyError("attractor estimate is not between the repellers; increase n_max");
    const double y_lo = static_cast<double>(c) / k;
    const double y_a = (2.0 * c + 1.0) / (2.0 * k);
    const double y_hi = static_cast<double>(c + 1) / k;
    std::vector<Node> comp;
    as.side_nodes(Side::u, c, r_prev, 0.0, xa, y_lo, y_a, comp);
    as.side_nodes(Side::v, c, r_prev, xa, width, y_a, y_hi, comp);
    comp.push_back({0.0, y_lo, true, r_prev});
    comp.push_back({xa, y_a, true, a});
    std::sort(comp.begin(), comp.end(), [](const Node& a, const Node& b) { return a.x < b.x; });
    // Keep the pinned node of any pair that is not strictly ordered.
    std::vector<Node> kept;
    for (const Node& nd : comp) {
      if (!(nd.x < width) || !(nd.y < y_hi)) continue;
      if (!kept.empty() && !(nd.x > kept.back().x && nd.y > kept.back().y)) {
        if (!nd.pinned || kept.back().pinned) continue;
        kept.pop_back();
        if (!kept.empty() && !(nd.x > kept.back().x && nd.y > kept.back().y))
          throw ConjugacyError("pinned node collides with the pullback nodes; increase n_max");
      }
      kept.push_back(nd);
    }
    for (const auto& nd : kept) nodes.emplace_back(nd.at, CirclePoint(nd.y));
  }
  try {
    return PiecewiseCircleMap(std::move(nodes));
  } catch (const ConjugacyError& e) {
    throw ConjugacyError(std::string("conjugacy nodes are out of order (") + e.what() +
                         "); increase n_max");
  }
}

ConjugacyParams resolve_params(const ConjugacyParams& p, const NoiseWindow& window) {
  ConjugacyParams r = p;
  const int half = std::min(-window.begin_index(), window.end_index());
  if (r.n_h <= 0) r.n_h = std::max(1, half / 5);
  if (r.interior <= 0) r.interior = std::max(2, half / 25);
  return r;
}

ConjugacyBuild build_conjugacy(const RandomHomeoFamily& fam, const MinimalStructure& s,
                               const NoiseWindow& window, const ConjugacyParams& params) {
  const ConjugacyParams p = resolve_params(params, window);
  ConjugacyBuild out;
  out.anchors = anchor_sequences(fam, s, window, p.n_h, p.anchors);
  out.k = out.anchors.k;
  out.l = out.anchors.l;
  out.h0 = assemble_conjugacy(fam, window, out.anchors, 0, p);
  out.h1 = assemble_conjugacy(fam, window, out.anchors, 1, p);
  for (int c = 0; c < out.k; ++c) {
    out.a0.push_back(out.anchors.a(c, 0));
    out.r0.push_back(out.anchors.r(c, 0));
  }
  return out;
}

double conjugation_residual(const RandomHomeoFamily& fam, const RandomHomeoFamily& target,
                            const NoiseWindow& window, const PiecewiseCircleMap& h0,
                            const PiecewiseCircleMap& h1, int grid, Exec exec) {
  if (grid < 1) throw DomainError("grid must be positive");
  const NoisePoint alpha = window.at(0);
  const auto d = parallel_map<double>(grid, [&](std::int64_t i) {
    const CirclePoint x(static_cast<double>(i) / grid);
    return dist(h1(fam.eval(alpha, x)), target.eval(alpha, h0(x)));
  }, exec);
  return *std::max_element(d.begin(), d.end());
}

Json ConjugacyReport::to_json() const {
  Json trend = Json::array();
  for (const auto& [n, r] : residual_trend) trend.push_back({{"half_width", n}, {"residual", r}});
  return {{"k", k},          {"l", l},
          {"seed", seed},    {"half_width", half_width},
          {"n_h", n_h},      {"node_count", node_count},
          {"residual_sup", residual_sup}, {"residual_trend", trend}};
}

// ---- coupled attractors ----------------------------------------------------

AttractorCloud coupled_attractor_graph(const RandomHomeoFamily& fam_f, const RandomHomeoFamily& fam_g,
                                       int m, int n_windows, int n_pull, std::uint64_t seed, Exec exec) {
  if (!(fam_f.noise() == fam_g.noise()))
    throw PreconditionError("the two families must share a noise model");
  if (m < 1 || n_windows < 1 || n_pull < 1) throw DomainError("m, n_windows and n_pull must be positive");
  const RandomHomeoFamily F = factor(fam_f, m);
  const RandomHomeoFamily G = factor(fam_g, m);
  using Pt = std::optional<std::pair<CirclePoint, CirclePoint>>;
  const auto pts = parallel_map<Pt>(n_windows, [&](std::int64_t w) -> Pt {
    const auto win = NoiseWindow::generate(fam_f.noise(), derive_seed(seed, static_cast<std::uint64_t>(w)),
                                           n_pull, 1);
    const auto cf = pullback_grid_clusters(F, win, 16, n_pull, Exec::serial);
    const auto cg = pullback_grid_clusters(G, win, 16, n_pull, Exec::serial);
    const bool ok = cf.centers.size() == 1 && cg.centers.size() == 1 && cf.max_diameter < 1e-8 &&
                    cg.max_diameter < 1e-8;
    if (!ok) return std::nullopt;
    return std::make_pair(cf.centers[0], cg.centers[0]);
  }, exec);
  AttractorCloud out;
  out.windows = n_windows;
  for (const auto& pt : pts) {
    if (pt) out.points.push_back(*pt);
    else ++out.skipped;
  }
  return out;
}

GraphTest graph_homeomorphism_test(const std::vector<std::pair<CirclePoint, CirclePoint>>& cloud,
                                   double fit_tol) {
  if (cloud.size() < 100) throw PreconditionError("graph test needs at least 100 points");
  auto pts = cloud;
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first.value() < b.first.value(); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            pts.end());
  const std::size_t n = pts.size();
  GraphTest out;
  std::vector<double> dy(n);
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dy[i] = wrap_signed(pts[(i + 1) % n].second.value() - pts[i].second.value());
    out.winding += dy[i];
    if (dy[i] > 0) ++pos;
    else if (dy[i] < 0) ++neg;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double a = dy[i], b = dy[(i + n - 1) % n];
    if (!((a > 0 && b > 0) || (a < 0 && b < 0))) ++out.sign_changes;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p0 = pts[(i + n - 1) % n];
    const auto& p1 = pts[i];
    const auto& p2 = pts[(i + 1) % n];
    const double span = dplus(p0.first, p2.first);
    const double f = span > 0 ? dplus(p0.first, p1.first) / span : 0.5;
    const double pred = p0.second.value() + f * wrap_signed(p2.second.value() - p0.second.value());
    out.max_deviation = std::max(out.max_deviation, std::abs(wrap_signed(p1.second.value() - pred)));
  }
  const int orient = pos == static_cast<int>(n) ? 1 : (neg == static_cast<int>(n) ? -1 : 0);
  if (orient != 0 && out.max_deviation < fit_tol && std::abs(out.winding - orient) < 1e-6) {
    std::vector<std::pair<CirclePoint, CirclePoint>> nodes;
    for (const auto& [x, y] : pts) nodes.emplace_back(x, orient > 0 ? y : -y);
    try {
      out.K = SignedCircleMap{orient, PiecewiseCircleMap(std::move(nodes))};
      out.is_curve = true;
      out.orientation = orient;
    } catch (const ConjugacyError&) {
      out.is_curve = false;
    }
  }
  return out;
}

Json GraphTest::to_json() const {
  return {{"is_curve", is_curve},
          {"orientation", orientation},
          {"max_deviation", max_deviation},
          {"sign_changes", sign_changes},
          {"winding", winding}};
}

LiftResult lift_factor_conjugacy(const RandomHomeoFamily& fam_f, const RandomHomeoFamily& fam_g, int m,
                                 const SignedCircleMap& K, int grid, double tol, int n_alpha) {
  if (m < 1 || grid < 8) throw DomainError("m must be positive and grid at least 8");
  LiftResult out;
  if (K.orientation < 0 && m >= 3) {
    out.reason = "orientation-reversing factor conjugacy does not lift for m >= 3";
    return out;
  }
  std::vector<std::pair<CirclePoint, CirclePoint>> nodes;
  nodes.reserve(static_cast<std::size_t>(grid));
  const CirclePoint k0 = K(CirclePoint(0.0));
  CirclePoint prev = mth_root(k0, m) + CirclePoint(static_cast<double>(sector(k0, m)) / m);
  for (int j = 0; j < grid; ++j) {
    const CirclePoint x(static_cast<double>(j) / grid);
    const CirclePoint root = mth_root(K(mfold(x, m)), m);
    CirclePoint best = root;
    double dbest = 2.0;
    for (int b = 0; b < m; ++b) {
      const CirclePoint cand = root + CirclePoint(static_cast<double>(b) / m);
      const double d = dist(cand, prev);
      if (d < dbest) {
        dbest = d;
        best = cand;
      }
    }
    if (j > 0 && dbest > 0.25 / m) {
      out.reason = "branch tracking jumped; the factor conjugacy is too coarse to lift";
      return out;
    }
    prev = best;
    nodes.emplace_back(x, K.orientation > 0 ? best : -best);
  }
  SignedCircleMap kappa;
  kappa.orientation = K.orientation;
  try {
    kappa.increasing = PiecewiseCircleMap(std::move(nodes));
  } catch (const ConjugacyError& e) {
    out.reason = std::string("lift is not a homeomorphism: ") + e.what();
    return out;
  }
  const auto& model = fam_f.noise();
  out.residuals.assign(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < n_alpha; ++a) {
    const NoisePoint alpha = model.sample(0x11f7ULL, a);
    for (int i = 0; i < 64; ++i) {
      const CirclePoint x((i + 0.5) / 64.0);
      const CirclePoint lhs = kappa(fam_f.eval(alpha, x));
      const CirclePoint rhs = fam_g.eval(alpha, kappa(x));
      for (int o = 0; o < m; ++o) {
        const double d = dist(lhs, rhs + CirclePoint(static_cast<double>(o) / m));
        auto& r = out.residuals[static_cast<std::size_t>(o)];
        r = std::max(r, d);
      }
    }
  }
  const auto it = std::min_element(out.residuals.begin(), out.residuals.end());
  if (*it < tol) {
    out.offset = static_cast<int>(it - out.residuals.begin());
    out.kappa = kappa;
    out.reason = out.offset == 0 ? "lift conjugates f to g" : "lift conjugates f to a rotated copy of g";
  } else {
    out.reason = "no rotational offset makes the lift a conjugacy";
  }
  return out;
}

Json LiftResult::to_json() const {
  return {{"found", kappa.has_value()}, {"offset", offset}, {"residuals", residuals}, {"reason", reason}};
}

}  // namespace rds
