#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rds/error.hpp"
#include "rds/family.hpp"
#include "rds/structure.hpp"

using namespace rds;

namespace {

constexpr double kPi = std::numbers::pi;
const NoisePoint kZero{0.0};

// Independent closed form of g_{k,l} on the real line.
double g_lift(int k, int l, double t) { return t + std::sin(2 * kPi * k * t) / (2 * kPi * k) + double(l) / k; }

double sup_diff(const RandomHomeoFamily& a, const RandomHomeoFamily& b, int n_alpha, int grid) {
  double worst = 0.0;
  for (int i = 0; i < n_alpha; ++i) {
    const auto alpha = a.noise().sample(99, i);
    for (int j = 0; j < grid; ++j) {
      const CirclePoint x((j + 0.37) / grid);
      worst = std::max(worst, dist(a.eval(alpha, x), b.eval(alpha, x)));
    }
  }
  return worst;
}

}  // namespace

TEST(Canonical, Examples) {
  const auto g10 = canonical(1, 0);
  EXPECT_EQ(g10.eval(kZero, CirclePoint(0.0)), CirclePoint(0.0));
  EXPECT_NEAR(dist(g10.eval(kZero, CirclePoint(0.5)), CirclePoint(0.5)), 0.0, 1e-15);
  const auto g21 = canonical(2, 1);
  EXPECT_NEAR(dist(g21.eval(kZero, CirclePoint(0.25)), CirclePoint(0.75)), 0.0, 1e-15);
  // 0.25 is a critical point of g_{2,1}, so the preimage is only determined
  // to about the cube root of the rounding error; the residual is exact.
  EXPECT_NEAR(dist(g21.eval_inverse(kZero, CirclePoint(0.75)), CirclePoint(0.25)), 0.0, 1e-5);
  EXPECT_NEAR(dist(g21.eval(kZero, g21.eval_inverse(kZero, CirclePoint(0.75))), CirclePoint(0.75)), 0.0, 1e-15);
  EXPECT_NEAR(dist(g10.eval_inverse(kZero, CirclePoint(0.0)), CirclePoint(0.0)), 0.0, 1e-15);
  EXPECT_NEAR(dist(canonical(2, 0).eval(kZero, CirclePoint(0.25)), CirclePoint(0.25)), 0.0, 1e-15);
  EXPECT_TRUE(g10.traits().target_only);
}

TEST(Canonical, PermutesLattice) {
  for (int k = 1; k <= 5; ++k)
    for (int l = 0; l < k; ++l) {
      const auto g = canonical(k, l);
      for (int i = 0; i < k; ++i)
        ASSERT_LT(dist(g.eval(kZero, CirclePoint(double(i) / k)), CirclePoint(double(i + l) / k)), 1e-14);
    }
}

TEST(Canonical, FixedPointsOfG10) {
  // Sign changes of g(x) - x on a fine grid are exactly at 0 and 1/2.
  const auto g = canonical(1, 0);
  int zeros = 0;
  const int n = 10000;
  for (int j = 0; j < n; ++j) {
    const double x = (j + 0.5) / n;
    const double d = g.lift(kZero, x) - x;
    ASSERT_NE(d, 0.0);
    const double x2 = (j + 1.5) / n;
    const double d2 = g.lift(kZero, x2) - x2;
    if ((d > 0) != (d2 > 0)) ++zeros;
  }
  EXPECT_EQ(zeros, 2);  // 0.5 inside, 1.0 ~ 0 at the wrap
}

TEST(Canonical, MatchesClosedForm) {
  for (int k = 1; k <= 4; ++k)
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < 200; ++j) {
        const double t = -1.0 + j / 67.0;
        ASSERT_NEAR(canonical(k, l).lift(kZero, t), g_lift(k, l, t), 1e-14);
      }
}

TEST(Examples, Example1ReducesToCanonical) {
  const auto f = example1(2, 1, 0.05);
  EXPECT_NEAR(dist(f.eval(NoisePoint{0.0, 0.7}, CirclePoint(0.25)), CirclePoint(0.75)), 0.0, 1e-15);
  EXPECT_EQ(f.noise().dimension(), 2);
  EXPECT_THROW(f.eval(NoisePoint{1.5, 0.0}, CirclePoint(0.1)), DomainError);
  // coordinate 1 reads the second noise entry
  const auto g = example1(2, 1, 0.05, 1);
  EXPECT_NEAR(dist(g.eval(NoisePoint{0.9, 0.0}, CirclePoint(0.25)), CirclePoint(0.75)), 0.0, 1e-15);
}

TEST(Examples, Example3) {
  const auto f = example3(1 / (2 * kPi), 0.0);
  EXPECT_NEAR(dist(f.eval(NoisePoint{0.0}, CirclePoint(0.0)), CirclePoint(0.0)), 0.0, 1e-15);
  const NoisePoint a{0.25};
  for (double eps : {0.05, 0.1, 0.15}) {
    const auto h = example3(eps, 0.1);
    for (int j = 0; j < 1000; ++j) {
      const CirclePoint x(j / 1000.0);
      ASSERT_LT(dist(h.eval_inverse(a, h.eval(a, x)), x), 1e-12) << eps;
    }
  }
  // eps = 1/(2 pi) has a critical point; check the inverse residual there.
  const auto c = example3(1 / (2 * kPi), 0.1);
  for (int j = 0; j < 1000; ++j) {
    const CirclePoint y(j / 1000.0);
    ASSERT_LT(dist(c.eval(a, c.eval_inverse(a, y)), y), 1e-15);
  }
  EXPECT_THROW(example3(0.2, 0.0), DomainError);
}

TEST(Examples, Example2MinusIsMirror) {
  for (double r : {0.05, 0.2}) EXPECT_LT(sup_diff(example2(2, 1, r, -1), mirror(example2(2, 1, r, +1)), 64, 256), 1e-14);
}

TEST(Rotation, Properties) {
  const auto id = linear_rotation(0.0, 0.0);
  const auto f = linear_rotation(0.1, 0.3);
  for (int i = 0; i < 50; ++i) {
    const auto a = f.noise().sample(3, i);
    const double s = 0.1 + 0.3 * a[0];
    for (int j = 0; j < 50; ++j) {
      const CirclePoint x(j / 50.0), y((j * 7 % 50) / 50.0 + 0.013);
      ASSERT_EQ(id.eval(a, x), x);
      ASSERT_LT(dist(f.eval(a, x) - x, CirclePoint(s)), 1e-15);
      ASSERT_NEAR(dist(f.eval(a, x), f.eval(a, y)), dist(x, y), 1e-15);
    }
  }
}

TEST(Mirror, InvolutionAndRotations) {
  const auto f = example1(2, 1, 0.2);
  EXPECT_LT(sup_diff(mirror(mirror(f)), f, 32, 32), 1e-15);
  EXPECT_LT(sup_diff(mirror(linear_rotation(0.1, 0.3)), linear_rotation(-0.1, -0.3), 64, 64), 1e-15);
  // -g_{1,0}(-x) = g_{1,0}(x); conjugating by the half-turn also fixes it.
  const auto m = mirror(canonical(1, 0));
  for (int j = 0; j < 1000; ++j) {
    const CirclePoint x(j / 1000.0);
    ASSERT_LT(dist(m.eval(kZero, x), canonical(1, 0).eval(kZero, x)), 1e-15);
    const auto r = rotate_conjugate(canonical(1, 0), CirclePoint(0.5));
    ASSERT_LT(dist(m.eval(kZero, x), r.eval(kZero, x + CirclePoint(0.5)) - CirclePoint(0.5)), 1e-15);
  }
}

TEST(Factor, CanonicalIdentity) {
  const auto g = canonical(1, 0);
  for (int k = 2; k <= 4; ++k)
    for (int l = 0; l < k; ++l) {
      const auto z = factor(canonical(k, l), k);
      for (int j = 0; j < 10000; ++j) {
        const CirclePoint y(j / 10000.0);
        ASSERT_LT(dist(z.eval(kZero, y), g.eval(kZero, y)), 1e-12);
      }
    }
}

TEST(Factor, TrivialAndRotation) {
  const auto f = example3(0.1, 0.2);
  EXPECT_LT(sup_diff(factor(f, 1), f, 32, 64), 1e-15);
  EXPECT_LT(sup_diff(factor(linear_rotation(0.1, 0.3), 3), linear_rotation(0.3, 0.9), 64, 64), 1e-14);
  EXPECT_THROW(factor(example3(0.1, 0.2), 2), PreconditionError);
}

TEST(Factor, Homomorphism) {
  const auto f = example1(3, 1, 0.1);
  const auto z = factor(f, 3);
  for (int i = 0; i < 20; ++i) {
    const auto a = f.noise().sample(5, 2 * i), b = f.noise().sample(5, 2 * i + 1);
    for (int j = 0; j < 200; ++j) {
      const CirclePoint y(j / 200.0);
      // z(f_a o f_b)(3x) = 3 f_a(f_b(x))
      const auto x = mth_root(y, 3);
      const auto lhs = mfold(f.eval(a, f.eval(b, x)), 3);
      const auto rhs = z.eval(a, z.eval(b, y));
      ASSERT_LT(dist(lhs, rhs), 1e-12);
    }
  }
}

TEST(RotateConjugate, Properties) {
  const auto f = example1(2, 1, 0.05);
  EXPECT_LT(sup_diff(rotate_conjugate(f, CirclePoint(0.0)), f, 32, 64), 1e-15);
  EXPECT_EQ(detect_rotational_symmetry(rotate_conjugate(f, CirclePoint(0.123))), detect_rotational_symmetry(f));
  const auto r = rotate_conjugate(canonical(1, 0), CirclePoint(0.5));
  for (double x : {0.0, 0.5}) EXPECT_LT(dist(r.eval(kZero, CirclePoint(x)), CirclePoint(x)), 1e-15);
  EXPECT_GT(dist(r.eval(kZero, CirclePoint(0.25)), CirclePoint(0.25)), 0.1);
}

TEST(Validate, PassWarnFail) {
  EXPECT_EQ(validate_family(example1(2, 1, 0.05), 64).status, ValidationStatus::pass);
  const auto w = validate_family(canonical(2, 1), 16);
  EXPECT_EQ(w.status, ValidationStatus::warn);
  EXPECT_FALSE(w.messages.empty());
  RandomHomeoFamily folded(
      NoiseModel::interval(-1, 1),
      [](const NoisePoint& a, double t) { return t + 0.5 * std::sin(2 * kPi * t) + 0.01 * a[0]; }, std::nullopt,
      Json{{"name", "folded"}});
  EXPECT_EQ(validate_family(folded, 16).status, ValidationStatus::fail);
}

TEST(Descriptor, RoundTrip) {
  const auto f = mirror(rotate_conjugate(example2(2, 1, 0.2, -1), CirclePoint(0.125)));
  const auto g = family_from_descriptor(f.descriptor());
  EXPECT_EQ(g.descriptor(), f.descriptor());
  EXPECT_EQ(sup_diff(f, g, 16, 64), 0.0);
  EXPECT_THROW(family_from_descriptor(Json{{"name", "nope"}}), ConfigError);
  EXPECT_THROW(family_from_descriptor(Json{{"name", "example1"}, {"k", 2}}), ConfigError);
  register_family("shifted_identity", [](const Json& p) { return linear_rotation(p.at("s").get<double>(), 0.0); });
  const auto u = family_from_descriptor(Json{{"name", "shifted_identity"}, {"s", 0.25}});
  EXPECT_LT(dist(u.eval(NoisePoint{0.0}, CirclePoint(0.0)), CirclePoint(0.25)), 1e-15);
}

TEST(Power, ComposesSteps) {
  const auto f = example3(0.1, 0.3);
  const auto p = power(f, 2);
  EXPECT_EQ(p.noise().dimension(), 2);
  const NoisePoint a{0.2, 0.7};
  const CirclePoint x(0.4);
  EXPECT_LT(dist(p.eval(a, x), f.eval(NoisePoint{0.7}, f.eval(NoisePoint{0.2}, x))), 1e-15);
  EXPECT_LT(dist(p.eval_inverse(a, p.eval(a, x)), x), 1e-12);
}
