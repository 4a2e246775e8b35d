#include "rds/circle.hpp"

#include <cmath>

#include "rds/error.hpp"

namespace rds {

CirclePoint mth_root(CirclePoint x, int m) noexcept {
  if (m <= 1) return x;
  const double md = static_cast<double>(m);
  double y = x.value() / md;
  // Snap to a neighbour whose m-fold product reproduces x exactly, when one
  // exists; otherwise keep the correctly rounded quotient.
  if (md * y != x.value()) {
    for (double cand : {std::nextafter(y, 0.0), std::nextafter(y, 1.0)}) {
      if (md * cand == x.value()) {
        y = cand;
        break;
      }
    }
  }
  if (md * y >= 1.0) y = std::nextafter(1.0 / md, 0.0);
  return CirclePoint(y);
}

int sector(CirclePoint x, int m) noexcept {
  if (m <= 1) return 0;
  int s = static_cast<int>(std::floor(static_cast<double>(m) * x.value()));
  if (s >= m) s = m - 1;
  if (s < 0) s = 0;
  return s;
}

std::pair<CirclePoint, CirclePoint> boundary_points(const Arc& a) {
  if (a.is_whole()) throw DomainError("boundary of the whole circle is undefined");
  return {a.start(), a.end()};
}

}  // namespace rds
