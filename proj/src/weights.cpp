#include "shiftcal/weights.hpp"

#include <cmath>
#include <limits>
#include <iostream>
#include <numbers>
#include <sstream>

#include "shiftcal/error.hpp"

namespace shiftcal {

DensitySpec DensitySpec::normal(double mean, double stddev) {
  if (!std::isfinite(mean) || !(stddev >= 0.0) || !std::isfinite(stddev))
    throw InvalidInput("normal density needs a finite mean and a non-negative stddev");
  return DensitySpec(Family::normal, mean, stddev);
}

DensitySpec DensitySpec::normal_from_variance(double mean, double variance) {
  if (!(variance >= 0.0)) throw InvalidInput("normal density variance must be non-negative");
  return normal(mean, std::sqrt(variance));
}

DensitySpec DensitySpec::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
    throw InvalidInput("uniform density bounds must be finite and ordered");
  return DensitySpec(Family::uniform, lo, hi);
}

double DensitySpec::pdf(double x) const noexcept {
  if (family_ == Family::normal) {
    if (second_ == 0.0) return x == first_ ? std::numeric_limits<double>::infinity() : 0.0;
    const double z = (x - first_) / second_;
    return std::exp(-0.5 * z * z) / (second_ * std::sqrt(2.0 * std::numbers::pi));
  }
  if (x < first_ || x > second_) return 0.0;
  if (first_ == second_) return std::numeric_limits<double>::infinity();
  return 1.0 / (second_ - first_);
}

double DensitySpec::sample(Rng& rng) const {
  if (family_ == Family::normal) {
    if (second_ == 0.0) return first_;
    std::normal_distribution<double> dist(first_, second_);
    return dist(rng);
  }
  if (first_ == second_) return first_;
  std::uniform_real_distribution<double> dist(first_, second_);
  return dist(rng);
}

std::string DensitySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (family_ == Family::normal ? "normal(" : "uniform(") << first_ << ", " << second_ << ")";
  return os.str();
}

double density_eval(const DensitySpec& spec, double x) noexcept { return spec.pdf(x); }

ImportanceWeights::ImportanceWeights(Eigen::VectorXd values, bool allow_zero)
    : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double b = values_(i);
    const bool ok = std::isfinite(b) && (b > 0.0 || (allow_zero && b == 0.0));
    if (!ok) {
      std::ostringstream os;
      os << "importance weight " << b << " at index " << i << " is not finite and positive";
      throw DegenerateWeight(static_cast<std::size_t>(i), os.str());
    }
  }
}

std::vector<std::size_t> ImportanceWeights::extreme_indices() const {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (values_(i) < kExtremeLow || values_(i) > kExtremeHigh) out.push_back(static_cast<std::size_t>(i));
  return out;
}

ImportanceWeights importance_weights(const Eigen::VectorXd& xs, const DensitySpec& q0,
                                     const DensitySpec& q1, WeightOptions options) {
  Eigen::VectorXd beta(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double p0 = q0.pdf(xs(i));
    const double p1 = q1.pdf(xs(i));
    if (!(p0 > 0.0) || !std::isfinite(p0)) {
      std::ostringstream os;
      os << "training density " << q0.describe() << " is " << p0 << " at index " << i
         << " (x = " << xs(i) << ")";
      throw DegenerateWeight(static_cast<std::size_t>(i), os.str());
    }
    beta(i) = p1 / p0;
  }
  ImportanceWeights weights(std::move(beta), options.allow_zero);
  if (options.warn_extreme) {
    const auto extreme = weights.extreme_indices();
    if (!extreme.empty())
      std::clog << "warning: " << extreme.size()
                << " importance weights outside [1e-12, 1e12], first at index " << extreme.front()
                << "; q0 and q1 supports may be mismatched\n";
  }
  return weights;
}

ImportanceWeights ordinary_weights(std::size_t n) {
  if (n < 1) throw InvalidInput("ordinary_weights needs n >= 1");
  return ImportanceWeights(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
}

}  // namespace shiftcal
