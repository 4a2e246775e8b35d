#pragma once

// Arithmetic on the circle R/Z.
//
// Points are stored by their canonical representative in [0, 1). Every
// arithmetic operation renormalizes, so comparisons are always made on
// canonical values. Equality is exact; use approx_equal() when a tolerance
// is intended.

#include <cmath>
#include <utility>

namespace rds {

/// Reduce a real number to its representative in [0, 1).
inline double wrap_unit(double t) noexcept {
  double v = t - std::floor(t);
  // t slightly below an integer can round up to exactly 1.0
  return v >= 1.0 ? 0.0 : v;
}

/// Signed representative of t in [-1/2, 1/2).
inline double wrap_signed(double t) noexcept {
  double v = wrap_unit(t + 0.5) - 0.5;
  return v;
}

class CirclePoint {
public:
  constexpr CirclePoint() noexcept = default;
  explicit CirclePoint(double t) noexcept : value_(wrap_unit(t)) {}

  constexpr double value() const noexcept { return value_; }

  friend CirclePoint operator+(CirclePoint a, CirclePoint b) noexcept {
    return CirclePoint(a.value_ + b.value_);
  }
  friend CirclePoint operator-(CirclePoint a, CirclePoint b) noexcept {
    return CirclePoint(a.value_ - b.value_);
  }
  friend CirclePoint operator-(CirclePoint a) noexcept { return CirclePoint(-a.value_); }
  CirclePoint& operator+=(CirclePoint b) noexcept { return *this = *this + b; }

  friend constexpr bool operator==(CirclePoint a, CirclePoint b) noexcept {
    return a.value_ == b.value_;
  }

private:
  double value_ = 0.0;
};

/// Anticlockwise distance from x to y, i.e. the length of the arc [x, y].
inline double dplus(CirclePoint x, CirclePoint y) noexcept {
  return wrap_unit(y.value() - x.value());
}

/// Circle metric: min(dplus(x,y), dplus(y,x)), in [0, 1/2]. Symmetric bitwise.
inline double dist(CirclePoint x, CirclePoint y) noexcept {
  double d = std::abs(x.value() - y.value());
  return d > 0.5 ? 1.0 - d : d;
}

inline bool approx_equal(CirclePoint x, CirclePoint y, double tol) noexcept {
  return dist(x, y) <= tol;
}

/// The m-fold sum m*x.
inline CirclePoint mfold(CirclePoint x, int m) noexcept {
  return CirclePoint(static_cast<double>(m) * x.value());
}

/// The unique y with y.value() in [0, 1/m) and m*y = x.
CirclePoint mth_root(CirclePoint x, int m) noexcept;

/// floor(m * x.value()), the index of the 1/m-sector containing x.
int sector(CirclePoint x, int m) noexcept;

/// Midpoint of the anticlockwise arc [a, b].
inline CirclePoint arc_midpoint(CirclePoint a, CirclePoint b) noexcept {
  return CirclePoint(a.value() + 0.5 * dplus(a, b));
}

/// Oriented arc [start, end] traversed anticlockwise. A whole-circle arc has
/// no boundary; construct it with Arc::whole().
class Arc {
public:
  Arc(CirclePoint start, CirclePoint end) noexcept : start_(start), end_(end) {}
  static Arc whole() noexcept {
    Arc a{CirclePoint{}, CirclePoint{}};
    a.whole_ = true;
    return a;
  }

  CirclePoint start() const noexcept { return start_; }
  CirclePoint end() const noexcept { return end_; }
  bool is_whole() const noexcept { return whole_; }

  /// Lebesgue measure of the arc.
  double length() const noexcept { return whole_ ? 1.0 : dplus(start_, end_); }

  /// Closed-arc membership [start, end].
  bool contains(CirclePoint x) const noexcept {
    return whole_ || dplus(start_, x) <= dplus(start_, end_);
  }
  /// ]start, end[
  bool contains_open(CirclePoint x) const noexcept {
    if (whole_) return true;
    double d = dplus(start_, x);
    return d > 0.0 && d < dplus(start_, end_);
  }
  /// [start, end[
  bool contains_closed_open(CirclePoint x) const noexcept {
    if (whole_) return true;
    return dplus(start_, x) < dplus(start_, end_) || (x == start_);
  }
  /// ]start, end]
  bool contains_open_closed(CirclePoint x) const noexcept {
    if (whole_) return true;
    double d = dplus(start_, x);
    return d > 0.0 && d <= dplus(start_, end_);
  }

  CirclePoint midpoint() const noexcept {
    return whole_ ? CirclePoint(0.5) : arc_midpoint(start_, end_);
  }

  /// Grow the arc by `margin` at both ends (saturates at the whole circle).
  Arc dilated(double margin) const noexcept {
    if (whole_ || length() + 2.0 * margin >= 1.0) return whole();
    return Arc(CirclePoint(start_.value() - margin), CirclePoint(end_.value() + margin));
  }

private:
  CirclePoint start_;
  CirclePoint end_;
  bool whole_ = false;
};

/// (lower boundary, upper boundary) of a proper arc. Throws DomainError for
/// the whole circle.
std::pair<CirclePoint, CirclePoint> boundary_points(const Arc& a);

}  // namespace rds
