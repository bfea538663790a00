#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "shiftcal/herd.hpp"
#include "shiftcal/sim.hpp"

namespace shiftcal {

/// Empirical push-forward predictive at one input.
struct PredictiveSample {
  double x = 0.0;
  std::vector<double> outputs;  // r(x, sample_j) in sample order
  double mean = 0.0;
};

/// Pairwise (tree) summation in index order; the result is independent of
/// thread scheduling.
double pairwise_sum(std::span<const double> values);

/// Runs the simulator at x once per parameter row; each run gets a seed
/// derived from (seed, j).
PredictiveSample predict(const Simulator& sim, double x, const Eigen::MatrixXd& parameters,
                         std::uint64_t seed);
PredictiveSample predict(const Simulator& sim, double x, const HerdedSamples& samples,
                         std::uint64_t seed);

/// sqrt(mean_i (R(x_i) - mean_j r(x_i, theta_j))^2) against the noise-free
/// truth. Input i uses seed derive(seed, "predict", i) for the simulator and
/// derive(seed, "truth", i) for the truth.
double rmse(const RegressionFunction& truth, const Eigen::VectorXd& test_inputs, const Simulator& sim,
            const Eigen::MatrixXd& parameters, std::uint64_t seed);

/// Predictive samples for every test input with the same seeding as rmse().
std::vector<PredictiveSample> predict_all(const Simulator& sim, const Eigen::VectorXd& inputs,
                                          const Eigen::MatrixXd& parameters, std::uint64_t seed);

/// RMSE between precomputed truth values and predictive means.
double rmse_from_means(std::span<const double> truth, std::span<const double> means);

Eigen::VectorXd generate_test_inputs(const DensitySpec& density, std::size_t n, std::uint64_t seed);

}  // namespace shiftcal
