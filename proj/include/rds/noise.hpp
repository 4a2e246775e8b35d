#pragma once

// Noise models and finite two-sided noise realizations.
//
// Window values are generated counter-style: the value at time index i is a
// pure function of (seed, i, coordinate). Windows with the same seed but
// different half-widths therefore agree on their overlap, and any index can be
// produced independently of the others.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <utility>
#include <vector>

namespace rds {

inline constexpr int kMaxNoiseDim = 6;

/// A point of the noise space; at most kMaxNoiseDim coordinates.
struct NoisePoint {
  std::array<double, kMaxNoiseDim> coord{};
  int dim = 0;

  NoisePoint() = default;
  NoisePoint(std::initializer_list<double> values);

  double operator[](int i) const { return coord[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return coord[static_cast<std::size_t>(i)]; }
  friend bool operator==(const NoisePoint& a, const NoisePoint& b);
};

/// Uniform distribution on a product of closed intervals.
class NoiseModel {
public:
  NoiseModel() = default;
  explicit NoiseModel(std::vector<std::pair<double, double>> box);

  static NoiseModel interval(double lo, double hi) { return NoiseModel({{lo, hi}}); }
  static NoiseModel cube(int dim, double lo, double hi);

  int dimension() const { return static_cast<int>(box_.size()); }
  const std::vector<std::pair<double, double>>& box() const { return box_; }

  bool contains(const NoisePoint& a) const;
  /// Map unit-cube coordinates u in [0,1)^d onto the box.
  NoisePoint from_unit(const std::array<double, kMaxNoiseDim>& u) const;
  /// Deterministic sample number `index` of the stream `seed`.
  NoisePoint sample(std::uint64_t seed, std::int64_t index) const;
  /// 2^d box corners plus the centre; used for envelope estimates.
  std::vector<NoisePoint> corners_and_centre() const;
  /// Regular grid with `per_axis` points per coordinate (capped at 4096 points).
  std::vector<NoisePoint> grid(int per_axis) const;

  friend bool operator==(const NoiseModel& a, const NoiseModel& b) { return a.box_ == b.box_; }

private:
  std::vector<std::pair<double, double>> box_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
/// Seed for task `ordinal` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) noexcept;
/// Uniform double in [0,1) from the top 53 bits.
inline double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}
/// Counter-based uniform in [0,1) for (seed, index, lane).
double counter_uniform(std::uint64_t seed, std::int64_t index, int lane) noexcept;

/// A realization (alpha_i) for i in [first, last) of an i.i.d. noise sequence,
/// seen through a shift: the view theta^s has (theta^s w)_i = w_{i+s}.
class NoiseWindow {
public:
  /// Values for indices [-n_past, n_future) drawn from `model` with `seed`.
  static NoiseWindow generate(const NoiseModel& model, std::uint64_t seed, int n_past,
                              int n_future);
  /// Symmetric window [-half_width, half_width).
  static NoiseWindow generate(const NoiseModel& model, std::uint64_t seed, int half_width) {
    return generate(model, seed, half_width, half_width);
  }
  /// Every entry equal to `value` on [-n_past, n_future).
  static NoiseWindow constant(const NoiseModel& model, const NoisePoint& value, int n_past,
                              int n_future);
  /// Explicit values, values[0] sitting at index `first`.
  static NoiseWindow from_values(const NoiseModel& model, int first,
                                 std::vector<NoisePoint> values);

  const NoisePoint& at(int i) const;
  const NoisePoint& operator[](int i) const { return at(i); }

  /// View of theta^j applied to this view.
  NoiseWindow shifted(int j) const;

  /// First valid index in this view.
  int begin_index() const { return first_ - shift_; }
  /// One past the last valid index in this view.
  int end_index() const { return first_ + static_cast<int>(values_->size()) - shift_; }
  bool has(int i) const { return i >= begin_index() && i < end_index(); }

  std::uint64_t seed() const { return seed_; }
  int shift() const { return shift_; }
  const NoiseModel& model() const { return model_; }

private:
  NoiseWindow() = default;

  NoiseModel model_;
  std::uint64_t seed_ = 0;
  int first_ = 0;
  int shift_ = 0;
  std::shared_ptr<const std::vector<NoisePoint>> values_;
};

}  // namespace rds
