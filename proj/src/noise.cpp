#include "rds/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rds/error.hpp"

namespace rds {

NoisePoint::NoisePoint(std::initializer_list<double> values) {
  if (values.size() > static_cast<std::size_t>(kMaxNoiseDim))
    throw DomainError("noise point has too many coordinates");
  dim = static_cast<int>(values.size());
  std::copy(values.begin(), values.end(), coord.begin());
}

bool operator==(const NoisePoint& a, const NoisePoint& b) {
  if (a.dim != b.dim) return false;
  for (int i = 0; i < a.dim; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

NoiseModel::NoiseModel(std::vector<std::pair<double, double>> box) : box_(std::move(box)) {
  if (box_.empty() || static_cast<int>(box_.size()) > kMaxNoiseDim)
    throw DomainError("noise dimension must be between 1 and " + std::to_string(kMaxNoiseDim));
  for (const auto& [lo, hi] : box_) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw DomainError("noise box must be non-degenerate in every coordinate");
  }
}

NoiseModel NoiseModel::cube(int dim, double lo, double hi) {
  return NoiseModel(std::vector<std::pair<double, double>>(static_cast<std::size_t>(dim), {lo, hi}));
}

bool NoiseModel::contains(const NoisePoint& a) const {
  if (a.dim != dimension()) return false;
  for (int i = 0; i < a.dim; ++i) {
    const auto& [lo, hi] = box_[static_cast<std::size_t>(i)];
    if (!(a[i] >= lo && a[i] <= hi)) return false;
  }
  return true;
}

NoisePoint NoiseModel::from_unit(const std::array<double, kMaxNoiseDim>& u) const {
  NoisePoint a;
  a.dim = dimension();
  for (int i = 0; i < a.dim; ++i) {
    const auto& [lo, hi] = box_[static_cast<std::size_t>(i)];
    a[i] = lo + (hi - lo) * u[static_cast<std::size_t>(i)];
  }
  return a;
}

NoisePoint NoiseModel::sample(std::uint64_t seed, std::int64_t index) const {
  std::array<double, kMaxNoiseDim> u{};
  for (int c = 0; c < dimension(); ++c) u[static_cast<std::size_t>(c)] = counter_uniform(seed, index, c);
  return from_unit(u);
}

std::vector<NoisePoint> NoiseModel::corners_and_centre() const {
  const int d = dimension();
  std::vector<NoisePoint> out;
  for (int mask = 0; mask < (1 << d); ++mask) {
    NoisePoint a;
    a.dim = d;
    for (int i = 0; i < d; ++i) {
      const auto& [lo, hi] = box_[static_cast<std::size_t>(i)];
      a[i] = (mask >> i) & 1 ? hi : lo;
    }
    out.push_back(a);
  }
  NoisePoint c;
  c.dim = d;
  for (int i = 0; i < d; ++i) {
    const auto& [lo, hi] = box_[static_cast<std::size_t>(i)];
    c[i] = 0.5 * (lo + hi);
  }
  out.push_back(c);
  return out;
}

std::vector<NoisePoint> NoiseModel::grid(int per_axis) const {
  const int d = dimension();
  per_axis = std::max(per_axis, 2);
  while (d > 1 && std::pow(per_axis, d) > 4096.0) --per_axis;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<NoisePoint> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    NoisePoint a;
    a.dim = d;
    std::size_t rest = flat;
    for (int i = 0; i < d; ++i) {
      const auto& [lo, hi] = box_[static_cast<std::size_t>(i)];
      const auto j = rest % static_cast<std::size_t>(per_axis);
      rest /= static_cast<std::size_t>(per_axis);
      a[i] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(per_axis - 1);
    }
    out.push_back(a);
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(ordinal + 0x632be59bd9b4e019ULL));
}

double counter_uniform(std::uint64_t seed, std::int64_t index, int lane) noexcept {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(index));
  key = splitmix64(key ^ (static_cast<std::uint64_t>(lane) * 0xd1b54a32d192ed03ULL));
  return to_unit(key);
}

NoiseWindow NoiseWindow::generate(const NoiseModel& model, std::uint64_t seed, int n_past,
                                  int n_future) {
  if (n_past < 0 || n_future < 0) throw DomainError("window extents must be non-negative");
  std::vector<NoisePoint> values;
  values.reserve(static_cast<std::size_t>(n_past + n_future));
  for (int i = -n_past; i < n_future; ++i) values.push_back(model.sample(seed, i));
  NoiseWindow w;
  w.model_ = model;
  w.seed_ = seed;
  w.first_ = -n_past;
  w.values_ = std::make_shared<const std::vector<NoisePoint>>(std::move(values));
  return w;
}

NoiseWindow NoiseWindow::constant(const NoiseModel& model, const NoisePoint& value, int n_past,
                                  int n_future) {
  if (!model.contains(value)) throw DomainError("constant window value outside noise box");
  NoiseWindow w;
  w.model_ = model;
  w.first_ = -n_past;
  w.values_ = std::make_shared<const std::vector<NoisePoint>>(
      static_cast<std::size_t>(n_past + n_future), value);
  return w;
}

NoiseWindow NoiseWindow::from_values(const NoiseModel& model, int first,
                                     std::vector<NoisePoint> values) {
  for (const auto& v : values)
    if (!model.contains(v)) throw DomainError("window value outside noise box");
  NoiseWindow w;
  w.model_ = model;
  w.first_ = first;
  w.values_ = std::make_shared<const std::vector<NoisePoint>>(std::move(values));
  return w;
}

const NoisePoint& NoiseWindow::at(int i) const {
  if (!has(i))
    throw IndexError("noise index " + std::to_string(i) + " outside window [" +
                     std::to_string(begin_index()) + ", " + std::to_string(end_index()) + ")");
  return (*values_)[static_cast<std::size_t>(i + shift_ - first_)];
}

NoiseWindow NoiseWindow::shifted(int j) const {
  NoiseWindow w = *this;
  w.shift_ += j;
  return w;
}

}  // namespace rds
