#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shiftcal/rng.hpp"

namespace shiftcal {

/// A one-dimensional input density: normal(mean, stddev) or uniform[lo, hi].
class DensitySpec {
 public:
  enum class Family { normal, uniform };

  static DensitySpec normal(double mean, double stddev);
  static DensitySpec normal_from_variance(double mean, double variance);
  static DensitySpec uniform(double lo, double hi);

  Family family() const noexcept { return family_; }
  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }

  double pdf(double x) const noexcept;
  double sample(Rng& rng) const;
  /// Human-readable tag, e.g. "normal(0.5, 0.5)".
  std::string describe() const;

  bool operator==(const DensitySpec&) const = default;

 private:
  DensitySpec(Family f, double a, double b) : family_(f), first_(a), second_(b) {}
  Family family_;
  double first_;   // mean or lower bound
  double second_;  // stddev or upper bound
};

double density_eval(const DensitySpec& spec, double x) noexcept;

/// Per-point importance weights beta_i, aligned with the training inputs.
/// Every entry is finite and positive (zero only when explicitly allowed).
class ImportanceWeights {
 public:
  static constexpr double kExtremeLow = 1e-12;
  static constexpr double kExtremeHigh = 1e12;

  explicit ImportanceWeights(Eigen::VectorXd values, bool allow_zero = false);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

  /// Indices whose weight falls outside [1e-12, 1e12].
  std::vector<std::size_t> extreme_indices() const;

 private:
  Eigen::VectorXd values_;
};

struct WeightOptions {
  bool allow_zero = false;
  bool warn_extreme = true;
};

/// beta_i = q1(x_i) / q0(x_i). Throws DegenerateWeight naming the first index
/// where q0 vanishes (or where q1 vanishes, unless allow_zero).
ImportanceWeights importance_weights(const Eigen::VectorXd& xs, const DensitySpec& q0,
                                     const DensitySpec& q1, WeightOptions options = {});

ImportanceWeights ordinary_weights(std::size_t n);

}  // namespace shiftcal
