#include "shiftcal/predict.hpp"

#include <cmath>

#include "shiftcal/error.hpp"
#include "shiftcal/parallel.hpp"

namespace shiftcal {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

PredictiveSample predict(const Simulator& sim, double x, const Eigen::MatrixXd& parameters,
                         std::uint64_t seed) {
  if (parameters.rows() == 0) throw InvalidInput("prediction needs at least one parameter sample");
  PredictiveSample out;
  out.x = x;
  out.outputs.resize(static_cast<std::size_t>(parameters.rows()));
  for (Eigen::Index j = 0; j < parameters.rows(); ++j) {
    const Eigen::VectorXd theta = parameters.row(j).transpose();
    out.outputs[static_cast<std::size_t>(j)] =
        sim.evaluate(x, theta, derive_seed(seed, "sample", {static_cast<std::uint64_t>(j)}));
  }
  out.mean = pairwise_sum(out.outputs) / static_cast<double>(out.outputs.size());
  return out;
}

PredictiveSample predict(const Simulator& sim, double x, const HerdedSamples& samples,
                         std::uint64_t seed) {
  return predict(sim, x, samples.samples, seed);
}

std::vector<PredictiveSample> predict_all(const Simulator& sim, const Eigen::VectorXd& inputs,
                                          const Eigen::MatrixXd& parameters, std::uint64_t seed) {
  std::vector<PredictiveSample> out(static_cast<std::size_t>(inputs.size()));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = predict(sim, inputs(static_cast<Eigen::Index>(i)), parameters,
                     derive_seed(seed, "predict", {i}));
  });
  return out;
}

double rmse_from_means(std::span<const double> truth, std::span<const double> means) {
  if (truth.empty() || truth.size() != means.size())
    throw InvalidInput("rmse needs matching, non-empty truth and prediction vectors");
  std::vector<double> sq(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) sq[i] = (truth[i] - means[i]) * (truth[i] - means[i]);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

double rmse(const RegressionFunction& truth, const Eigen::VectorXd& test_inputs, const Simulator& sim,
            const Eigen::MatrixXd& parameters, std::uint64_t seed) {
  if (test_inputs.size() < 1) throw InvalidInput("rmse needs at least one test input");
  const auto preds = predict_all(sim, test_inputs, parameters, seed);
  std::vector<double> truth_values(preds.size());
  std::vector<double> means(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    truth_values[i] = truth(test_inputs(static_cast<Eigen::Index>(i)), derive_seed(seed, "truth", {i}));
    means[i] = preds[i].mean;
  }
  return rmse_from_means(truth_values, means);
}

Eigen::VectorXd generate_test_inputs(const DensitySpec& density, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("need at least one test input");
  Rng rng(derive_seed(seed, "test-inputs"));
  Eigen::VectorXd xs(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < xs.size(); ++i) xs(i) = density.sample(rng);
  return xs;
}

}  // namespace shiftcal
