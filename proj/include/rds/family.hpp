#pragma once

// Random circle homeomorphisms: noise-indexed families alpha -> f_alpha of
// orientation-preserving circle homeomorphisms, represented through their
// degree-one lifts F_alpha : R -> R with F_alpha(t + 1) = F_alpha(t) + 1.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rds/circle.hpp"
#include "rds/noise.hpp"

namespace rds {

using Json = nlohmann::json;

/// Lift of f_alpha evaluated at a real argument.
using LiftFn = std::function<double(const NoisePoint&, double)>;
/// Rotation amount s(alpha) of a random rotation, as a real number (mod 1).
using ShiftFn = std::function<double(const NoisePoint&)>;

struct FamilyTraits {
  bool noise_independent = false;    ///< f_alpha does not depend on alpha
  bool target_only = false;          ///< may serve as a conjugacy target only
  bool ignores_noise_domain = false; ///< eval accepts any alpha (canonical maps)
};

class RandomHomeoFamily {
public:
  using Traits = FamilyTraits;

  RandomHomeoFamily(NoiseModel noise, LiftFn lift, std::optional<LiftFn> inverse_lift,
                    Json descriptor, Traits traits = {});

  /// f_alpha(x). Throws DomainError if alpha lies outside the noise box.
  CirclePoint eval(const NoisePoint& alpha, CirclePoint x) const;
  /// f_alpha^{-1}(y): closed form when available, else bisection on the lift.
  CirclePoint eval_inverse(const NoisePoint& alpha, CirclePoint y) const;

  /// Unchecked lift F_alpha(t).
  double lift(const NoisePoint& alpha, double t) const { return lift_(alpha, t); }
  /// Unchecked inverse lift F_alpha^{-1}(t).
  double inverse_lift(const NoisePoint& alpha, double t) const;

  const NoiseModel& noise() const { return noise_; }
  const Json& descriptor() const { return descriptor_; }
  const Traits& traits() const { return traits_; }
  bool has_closed_form_inverse() const { return inverse_.has_value(); }

  /// s(alpha) when the family is known to be a random rotation.
  const std::optional<ShiftFn>& rotation_shift() const { return shift_; }
  RandomHomeoFamily& set_rotation_shift(ShiftFn s) {
    shift_ = std::move(s);
    return *this;
  }

  void check_domain(const NoisePoint& alpha) const;

private:
  NoiseModel noise_;
  LiftFn lift_;
  std::optional<LiftFn> inverse_;
  std::optional<ShiftFn> shift_;
  Json descriptor_;
  Traits traits_;
};

/// Bisection inverse of a strictly increasing degree-one lift: returns t with
/// F(t) = y. At most 80 halvings; throws NumericError if the bracket has not
/// shrunk below 1e-13.
double invert_lift_bisection(const std::function<double(double)>& lift, double y);

// ---- built-in families -----------------------------------------------------

/// g_{k,l}(x) = x + sin(2 pi k x)/(2 pi k) + l/k, constant in alpha. Usable
/// only as a conjugacy target.
RandomHomeoFamily canonical(int k, int l);

/// g_{k,l} + r * alpha[coordinate] over the box [-1,1]^2.
RandomHomeoFamily example1(int k, int l, double r, int coordinate = 0);

/// g_{k,l} + sign * r * alpha over [-1,1]; sign is +1 or -1.
RandomHomeoFamily example2(int k, int l, double r, int sign = +1);

/// x + c + eps * sin(2 pi (x + alpha)) over [0,1], eps in (0, 1/(2 pi)].
RandomHomeoFamily example3(double eps, double c);

/// x + s(alpha).
RandomHomeoFamily random_rotation(NoiseModel noise, ShiftFn s, Json descriptor);
/// s(alpha) = offset + scale * alpha[0] over [-1,1].
RandomHomeoFamily linear_rotation(double offset, double scale);

// ---- combinators ------------------------------------------------------------

/// x -> -f_alpha(-x).
RandomHomeoFamily mirror(const RandomHomeoFamily& fam);

/// R_c o f_alpha o R_{-c}.
RandomHomeoFamily rotate_conjugate(const RandomHomeoFamily& fam, CirclePoint c);

/// Quotient z_m(f_alpha)(m x) = m f_alpha(x). Throws PreconditionError when
/// tau_m fails to commute with the sampled maps beyond `tol`.
RandomHomeoFamily factor(const RandomHomeoFamily& fam, int m, double tol = 1e-9);

/// n-step family f_{a_{n-1}} o ... o f_{a_0} over the n-fold product box.
RandomHomeoFamily power(const RandomHomeoFamily& fam, int n);

// ---- descriptors ----------------------------------------------------------

using FamilyFactory = std::function<RandomHomeoFamily(const Json& params)>;

/// Registers a named family constructor for descriptor parsing; replaces any
/// previous registration under the same name.
void register_family(const std::string& name, FamilyFactory factory);

/// Builds a family from {"name": ..., params...}. Combinators take an "of"
/// field holding the inner descriptor. Throws ConfigError.
RandomHomeoFamily family_from_descriptor(const Json& descriptor);

// ---- validation -------------------------------------------------------------

enum class ValidationStatus { pass, warn, fail };

struct ValidationReport {
  ValidationStatus status = ValidationStatus::pass;
  std::vector<std::string> messages;
  double max_degree_defect = 0.0;
  double max_roundtrip_error = 0.0;   ///< sup dist(f^-1(f(x)), x)
  double max_inverse_residual = 0.0;  ///< sup dist(f(f^-1(y)), y)
  int orientation_violations = 0;
};

/// Heuristic check of the family hypotheses on sampled grids. Flags families
/// that are constant in alpha; never claims that non-degeneracy holds.
ValidationReport validate_family(const RandomHomeoFamily& fam, int n_samples,
                                 std::uint64_t seed = 0x5eed);

const char* to_string(ValidationStatus s);

}  // namespace rds
