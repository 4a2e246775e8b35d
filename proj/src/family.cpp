#include "rds/family.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "rds/error.hpp"

namespace rds {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string noise_str(const NoisePoint& a) {
  std::string s = "(";
  for (int i = 0; i < a.dim; ++i) {
    if (i) s += ", ";
    s += std::to_string(a[i]);
  }
  return s + ")";
}

}  // namespace

RandomHomeoFamily::RandomHomeoFamily(NoiseModel noise, LiftFn lift,
                                     std::optional<LiftFn> inverse_lift, Json descriptor,
                                     Traits traits)
    : noise_(std::move(noise)),
      lift_(std::move(lift)),
      inverse_(std::move(inverse_lift)),
      descriptor_(std::move(descriptor)),
      traits_(traits) {}

void RandomHomeoFamily::check_domain(const NoisePoint& alpha) const {
  if (traits_.ignores_noise_domain) return;
  if (!noise_.contains(alpha)) throw DomainError("noise point " + noise_str(alpha) + " outside noise box");
}

CirclePoint RandomHomeoFamily::eval(const NoisePoint& alpha, CirclePoint x) const {
  check_domain(alpha);
  return CirclePoint(lift_(alpha, x.value()));
}

double RandomHomeoFamily::inverse_lift(const NoisePoint& alpha, double t) const {
  if (inverse_) return (*inverse_)(alpha, t);
  return invert_lift_bisection([&](double s) { return lift_(alpha, s); }, t);
}

CirclePoint RandomHomeoFamily::eval_inverse(const NoisePoint& alpha, CirclePoint y) const {
  check_domain(alpha);
  return CirclePoint(inverse_lift(alpha, y.value()));
}

double invert_lift_bisection(const std::function<double(double)>& lift, double y) {
  const double f0 = lift(0.0);
  if (!std::isfinite(f0)) throw NumericError("lift evaluation is not finite");
  // Solve F(t) = target with target in [F(0), F(0) + 1); the root is in [0, 1).
  const double shift = std::floor(y - f0);
  const double target = y - shift;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = lift(mid);
    if (!std::isfinite(fm)) throw NumericError("lift evaluation is not finite");
    if (fm <= target)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo > 1e-13) throw NumericError("bisection inverse did not converge");
  const double t = (std::abs(lift(hi) - target) < std::abs(lift(lo) - target)) ? hi : lo;
  return t + shift;
}

// ---- built-ins -------------------------------------------------------------

namespace {

double canonical_lift(int k, int l, double t) {
  const double kk = static_cast<double>(k);
  return t + std::sin(kTwoPi * kk * t) / (kTwoPi * kk) + static_cast<double>(l) / kk;
}

void check_kl(int k, int l) {
  if (k < 1) throw DomainError("k must be a positive integer");
  if (l < 0 || l >= k) throw DomainError("l must lie in {0, ..., k-1}");
}

}  // namespace

RandomHomeoFamily canonical(int k, int l) {
  check_kl(k, l);
  Json d = {{"name", "canonical"}, {"k", k}, {"l", l}};
  RandomHomeoFamily::Traits tr;
  tr.noise_independent = true;
  tr.target_only = true;
  tr.ignores_noise_domain = true;
  return RandomHomeoFamily(
      NoiseModel::interval(-1.0, 1.0), [k, l](const NoisePoint&, double t) { return canonical_lift(k, l, t); },
      std::nullopt, std::move(d), tr);
}

RandomHomeoFamily example1(int k, int l, double r, int coordinate) {
  check_kl(k, l);
  if (!(r > 0.0)) throw DomainError("example1 requires r > 0");
  if (coordinate != 0 && coordinate != 1) throw DomainError("example1 coordinate must be 0 or 1");
  Json d = {{"name", "example1"}, {"k", k}, {"l", l}, {"r", r}, {"coordinate", coordinate}};
  return RandomHomeoFamily(
      NoiseModel::cube(2, -1.0, 1.0),
      [k, l, r, coordinate](const NoisePoint& a, double t) {
        return canonical_lift(k, l, t) + r * a[coordinate];
      },
      std::nullopt, std::move(d));
}

RandomHomeoFamily example2(int k, int l, double r, int sign) {
  check_kl(k, l);
  if (!(r > 0.0)) throw DomainError("example2 requires r > 0");
  if (sign != 1 && sign != -1) throw DomainError("example2 sign must be +1 or -1");
  Json d = {{"name", "example2"}, {"k", k}, {"l", l}, {"r", r}, {"sign", sign > 0 ? "+" : "-"}};
  const double sr = sign * r;
  return RandomHomeoFamily(
      NoiseModel::interval(-1.0, 1.0),
      [k, l, sr](const NoisePoint& a, double t) { return canonical_lift(k, l, t) + sr * a[0]; },
      std::nullopt, std::move(d));
}

RandomHomeoFamily example3(double eps, double c) {
  if (!(eps > 0.0) || eps > 1.0 / kTwoPi + 1e-15)
    throw DomainError("example3 requires epsilon in (0, 1/(2 pi)]");
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("example3 requires c in [0, 1)");
  Json d = {{"name", "example3"}, {"epsilon", eps}, {"c", c}};
  return RandomHomeoFamily(
      NoiseModel::interval(0.0, 1.0),
      [eps, c](const NoisePoint& a, double t) { return t + c + eps * std::sin(kTwoPi * (t + a[0])); },
      std::nullopt, std::move(d));
}

RandomHomeoFamily random_rotation(NoiseModel noise, ShiftFn s, Json descriptor) {
  RandomHomeoFamily fam(
      std::move(noise), [s](const NoisePoint& a, double t) { return t + s(a); },
      LiftFn([s](const NoisePoint& a, double t) { return t - s(a); }), std::move(descriptor));
  fam.set_rotation_shift(s);
  return fam;
}

RandomHomeoFamily linear_rotation(double offset, double scale) {
  Json d = {{"name", "rotation"}, {"offset", offset}, {"scale", scale}};
  auto fam = random_rotation(
      NoiseModel::interval(-1.0, 1.0), [offset, scale](const NoisePoint& a) { return offset + scale * a[0]; },
      std::move(d));
  if (scale == 0.0) {
    // the descriptor stays a rotation; only the independence flag changes
    RandomHomeoFamily::Traits tr;
    tr.noise_independent = true;
    RandomHomeoFamily out(fam.noise(), [offset](const NoisePoint&, double t) { return t + offset; },
                          LiftFn([offset](const NoisePoint&, double t) { return t - offset; }),
                          fam.descriptor(), tr);
    out.set_rotation_shift([offset](const NoisePoint&) { return offset; });
    return out;
  }
  return fam;
}

// ---- combinators ------------------------------------------------------------

RandomHomeoFamily mirror(const RandomHomeoFamily& fam) {
  auto base = std::make_shared<const RandomHomeoFamily>(fam);
  Json d = {{"name", "mirror"}, {"of", fam.descriptor()}};
  std::optional<LiftFn> inv;
  if (fam.has_closed_form_inverse())
    inv = [base](const NoisePoint& a, double t) { return -base->inverse_lift(a, -t); };
  RandomHomeoFamily out(
      fam.noise(), [base](const NoisePoint& a, double t) { return -base->lift(a, -t); }, inv,
      std::move(d), fam.traits());
  if (const auto& s = fam.rotation_shift())
    out.set_rotation_shift([s = *s](const NoisePoint& a) { return -s(a); });
  return out;
}

RandomHomeoFamily rotate_conjugate(const RandomHomeoFamily& fam, CirclePoint c) {
  auto base = std::make_shared<const RandomHomeoFamily>(fam);
  const double cv = c.value();
  Json d = {{"name", "rotate_conjugate"}, {"c", cv}, {"of", fam.descriptor()}};
  std::optional<LiftFn> inv;
  if (fam.has_closed_form_inverse())
    inv = [base, cv](const NoisePoint& a, double t) { return base->inverse_lift(a, t - cv) + cv; };
  RandomHomeoFamily out(
      fam.noise(), [base, cv](const NoisePoint& a, double t) { return base->lift(a, t - cv) + cv; }, inv,
      std::move(d), fam.traits());
  if (const auto& s = fam.rotation_shift()) out.set_rotation_shift(*s);
  return out;
}

RandomHomeoFamily factor(const RandomHomeoFamily& fam, int m, double tol) {
  if (m < 1) throw DomainError("factor order must be positive");
  if (m == 1) return fam;
  // commutation with tau_m on a sampled grid
  const double step = 1.0 / m;
  std::vector<NoisePoint> alphas = fam.noise().corners_and_centre();
  for (int i = 0; i < 8; ++i) alphas.push_back(fam.noise().sample(0xfac7, i));
  for (const auto& a : alphas) {
    for (int j = 0; j < 64; ++j) {
      CirclePoint x(j / 64.0 + 0.37 / 64.0);
      const double err = dist(fam.eval(a, x + CirclePoint(step)), fam.eval(a, x) + CirclePoint(step));
      if (err > tol)
        throw PreconditionError("rotation by 1/" + std::to_string(m) +
                                " does not commute with the family (defect " + std::to_string(err) + ")");
    }
  }
  auto base = std::make_shared<const RandomHomeoFamily>(fam);
  const double md = m;
  Json d = {{"name", "factor"}, {"m", m}, {"of", fam.descriptor()}};
  std::optional<LiftFn> inv;
  if (fam.has_closed_form_inverse())
    inv = [base, md](const NoisePoint& a, double t) { return md * base->inverse_lift(a, t / md); };
  RandomHomeoFamily out(
      fam.noise(), [base, md](const NoisePoint& a, double t) { return md * base->lift(a, t / md); }, inv,
      std::move(d), fam.traits());
  if (const auto& s = fam.rotation_shift())
    out.set_rotation_shift([s = *s, md](const NoisePoint& a) { return md * s(a); });
  return out;
}

RandomHomeoFamily power(const RandomHomeoFamily& fam, int n) {
  if (n < 1) throw DomainError("power must be positive");
  if (n == 1) return fam;
  const int d = fam.noise().dimension();
  if (n * d > kMaxNoiseDim) throw DomainError("power family exceeds the maximal noise dimension");
  std::vector<std::pair<double, double>> box;
  for (int i = 0; i < n; ++i)
    for (const auto& b : fam.noise().box()) box.push_back(b);
  auto base = std::make_shared<const RandomHomeoFamily>(fam);
  auto slice = [d](const NoisePoint& a, int i) {
    NoisePoint s;
    s.dim = d;
    for (int c = 0; c < d; ++c) s[c] = a[i * d + c];
    return s;
  };
  Json desc = {{"name", "power"}, {"n", n}, {"of", fam.descriptor()}};
  LiftFn fwd = [base, slice, n](const NoisePoint& a, double t) {
    for (int i = 0; i < n; ++i) t = base->lift(slice(a, i), t);
    return t;
  };
  LiftFn inv = [base, slice, n](const NoisePoint& a, double t) {
    for (int i = n - 1; i >= 0; --i) t = base->inverse_lift(slice(a, i), t);
    return t;
  };
  return RandomHomeoFamily(NoiseModel(std::move(box)), fwd, inv, std::move(desc), fam.traits());
}

// ---- registry ---------------------------------------------------------------

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, FamilyFactory> factories;
};

template <typename T>
T get_param(const Json& p, const char* key) {
  if (!p.contains(key)) throw ConfigError(std::string("family descriptor missing '") + key + "'");
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("family descriptor field '") + key + "' has the wrong type");
  }
}

int parse_sign(const Json& p) {
  if (!p.contains("sign")) return +1;
  const auto& s = p.at("sign");
  if (s.is_string()) {
    const auto v = s.get<std::string>();
    if (v == "+") return +1;
    if (v == "-") return -1;
  } else if (s.is_number_integer()) {
    const int v = s.get<int>();
    if (v == 1 || v == -1) return v;
  }
  throw ConfigError("example2 sign must be \"+\" or \"-\"");
}

Registry& registry() {
  static Registry* reg = [] {
    auto* r = new Registry;
    r->factories["canonical"] = [](const Json& p) {
      return canonical(get_param<int>(p, "k"), get_param<int>(p, "l"));
    };
    r->factories["example1"] = [](const Json& p) {
      return example1(get_param<int>(p, "k"), get_param<int>(p, "l"), get_param<double>(p, "r"),
                      p.value("coordinate", 0));
    };
    r->factories["example2"] = [](const Json& p) {
      return example2(get_param<int>(p, "k"), get_param<int>(p, "l"), get_param<double>(p, "r"),
                      parse_sign(p));
    };
    r->factories["example3"] = [](const Json& p) {
      return example3(get_param<double>(p, "epsilon"), get_param<double>(p, "c"));
    };
    r->factories["rotation"] = [](const Json& p) {
      return linear_rotation(p.value("offset", 0.0), p.value("scale", 0.0));
    };
    r->factories["mirror"] = [](const Json& p) {
      return mirror(family_from_descriptor(get_param<Json>(p, "of")));
    };
    r->factories["rotate_conjugate"] = [](const Json& p) {
      return rotate_conjugate(family_from_descriptor(get_param<Json>(p, "of")),
                              CirclePoint(get_param<double>(p, "c")));
    };
    r->factories["factor"] = [](const Json& p) {
      return factor(family_from_descriptor(get_param<Json>(p, "of")), get_param<int>(p, "m"));
    };
    r->factories["power"] = [](const Json& p) {
      return power(family_from_descriptor(get_param<Json>(p, "of")), get_param<int>(p, "n"));
    };
    return r;
  }();
  return *reg;
}

}  // namespace

void register_family(const std::string& name, FamilyFactory factory) {
  auto& reg = registry();
  std::lock_guard lock(reg.mu);
  reg.factories[name] = std::move(factory);
}

RandomHomeoFamily family_from_descriptor(const Json& descriptor) {
  if (!descriptor.is_object() || !descriptor.contains("name") || !descriptor.at("name").is_string())
    throw ConfigError("family descriptor must be an object with a string 'name'");
  const auto name = descriptor.at("name").get<std::string>();
  FamilyFactory factory;
  {
    auto& reg = registry();
    std::lock_guard lock(reg.mu);
    auto it = reg.factories.find(name);
    if (it == reg.factories.end()) throw ConfigError("unknown family '" + name + "'");
    factory = it->second;
  }
  try {
    return factory(descriptor);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid parameters for family '") + name + "': " + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("invalid family '") + name + "': " + e.what());
  }
}

// ---- validation -------------------------------------------------------------

const char* to_string(ValidationStatus s) {
  switch (s) {
    case ValidationStatus::pass: return "pass";
    case ValidationStatus::warn: return "warn";
    case ValidationStatus::fail: return "fail";
  }
  return "?";
}

namespace {

bool cyclically_ordered(CirclePoint a, CirclePoint b, CirclePoint c) {
  return dplus(a, b) < dplus(a, c);
}

}  // namespace

ValidationReport validate_family(const RandomHomeoFamily& fam, int n_samples, std::uint64_t seed) {
  ValidationReport rep;
  const auto& noise = fam.noise();
  std::vector<NoisePoint> alphas = noise.corners_and_centre();
  for (int i = 0; i < n_samples; ++i) alphas.push_back(noise.sample(seed, i));

  constexpr int kGrid = 256;
  bool orientation_bad = false;
  double max_dep = 0.0;  // variation of f_alpha(x) over alpha
  double max_jump = 0.0; // continuity in alpha
  const NoisePoint& ref = alphas.front();

  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const auto& a = alphas[ai];
    double prev = fam.lift(a, 0.0);
    for (int j = 0; j <= kGrid; ++j) {
      const double t = static_cast<double>(j) / kGrid;
      const double v = fam.lift(a, t);
      rep.max_degree_defect = std::max(rep.max_degree_defect, std::abs(fam.lift(a, t + 1.0) - v - 1.0));
      if (j > 0 && !(v > prev)) orientation_bad = true;
      prev = v;
      max_dep = std::max(max_dep, dist(fam.eval(a, CirclePoint(t)), fam.eval(ref, CirclePoint(t))));
      const CirclePoint x(t);
      rep.max_roundtrip_error = std::max(rep.max_roundtrip_error, dist(fam.eval_inverse(a, fam.eval(a, x)), x));
      rep.max_inverse_residual = std::max(rep.max_inverse_residual, dist(fam.eval(a, fam.eval_inverse(a, x)), x));
    }
    // perturb alpha slightly inside the box
    NoisePoint b = a;
    for (int c = 0; c < b.dim; ++c) {
      const auto& [lo, hi] = noise.box()[static_cast<std::size_t>(c)];
      const double h = 1e-7 * (hi - lo);
      b[c] = (b[c] + h <= hi) ? b[c] + h : b[c] - h;
    }
    for (int j = 0; j < 32; ++j) {
      const double t = (j + 0.5) / 32.0;
      max_jump = std::max(max_jump, std::abs(fam.lift(a, t) - fam.lift(b, t)));
    }
  }

  {
    std::uint64_t s = seed ^ 0x0123456789abcdefULL;
    const int triples = std::max(200, n_samples * 10);
    for (int i = 0; i < triples; ++i) {
      const auto& a = alphas[static_cast<std::size_t>(i) % alphas.size()];
      CirclePoint x(counter_uniform(s, i, 0)), y(counter_uniform(s, i, 1)), z(counter_uniform(s, i, 2));
      if (!cyclically_ordered(x, y, z)) std::swap(y, z);
      if (x == y || y == z || x == z) continue;
      if (!cyclically_ordered(fam.eval(a, x), fam.eval(a, y), fam.eval(a, z))) ++rep.orientation_violations;
    }
  }

  if (orientation_bad || rep.orientation_violations > 0) {
    rep.status = ValidationStatus::fail;
    rep.messages.emplace_back("orientation: lift is not strictly increasing");
  }
  if (rep.max_degree_defect > 1e-9) {
    rep.status = ValidationStatus::fail;
    rep.messages.emplace_back("degree: lift does not satisfy F(t+1) = F(t) + 1");
  }
  if (max_jump > 1e-3) {
    rep.status = ValidationStatus::fail;
    rep.messages.emplace_back("continuity: f_alpha jumps under a small change of alpha");
  }
  if (rep.status != ValidationStatus::fail) {
    if (fam.traits().noise_independent || max_dep < 1e-14) {
      rep.status = ValidationStatus::warn;
      rep.messages.emplace_back(
          "noise-independent family: a deterministic map has a finite invariant orbit, so the "
          "non-degeneracy condition cannot hold");
    }
    // The forward round trip is only informative away from critical points,
    // where it is cube-root conditioned; the residual is the reliable check.
    if (rep.max_inverse_residual > 1e-10) {
      rep.status = ValidationStatus::warn;
      rep.messages.emplace_back("inverse: f(f^-1(y)) misses y by more than 1e-10");
    }
  }
  return rep;
}

}  // namespace rds
