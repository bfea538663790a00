#include "shiftcal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shiftcal/error.hpp"

namespace shiftcal {

double linear_sim(double x, std::span<const double> theta) {
  if (theta.size() != 2) throw DimensionMismatch("linear simulator takes a 2-vector");
  return theta[0] + theta[1] * x;
}

double cubic_truth(double x) { return -x + x * x * x; }

AssemblyLineParams AssemblyLineParams::from_span(std::span<const double> theta) {
  if (theta.size() != 4) throw DimensionMismatch("assembly line takes a 4-vector");
  return {theta[0], theta[1], theta[2], theta[3]};
}

namespace {

double service_time(Rng& rng, double mean, double spread) {
  if (spread == 0.0) return std::max(0.0, mean);
  std::normal_distribution<double> dist(mean, spread);
  return std::max(0.0, dist(rng));
}

void check_assembly_params(const AssemblyLineParams& p) {
  const double v[] = {p.assembly_mean, p.assembly_spread, p.inspection_mean, p.inspection_spread};
  for (double c : v)
    if (!std::isfinite(c)) throw InvalidInput("assembly parameters must be finite");
  if (!(p.assembly_mean > 0.0) || !(p.inspection_mean > 0.0))
    throw InvalidInput("assembly and inspection mean times must be positive");
  if (p.assembly_spread < 0.0 || p.inspection_spread < 0.0)
    throw InvalidInput("service time spreads must be non-negative");
}

}  // namespace

double assembly_sim(long products, const AssemblyLineParams& theta, std::uint64_t seed) {
  if (products < 1) throw InvalidInput("assembly line needs at least one product");
  check_assembly_params(theta);
  const double key[] = {static_cast<double>(products), theta.assembly_mean, theta.assembly_spread,
                        theta.inspection_mean, theta.inspection_spread};
  Rng rng(hash_reals(seed, key));

  double assembled_at = 0.0;   // completion time of the latest assembled product
  double inspector_free = 0.0; // completion time of the latest inspection
  int in_batch = 0;
  for (long k = 0; k < products; ++k) {
    assembled_at += service_time(rng, theta.assembly_mean, theta.assembly_spread);
    ++in_batch;
    if (in_batch == kInspectionBatch || k + 1 == products) {
      const double start = std::max(assembled_at, inspector_free);
      inspector_free = start + service_time(rng, theta.inspection_mean, theta.inspection_spread);
      in_batch = 0;
    }
  }
  return inspector_free;
}

double LinearSimulator::evaluate(double x, std::span<const double> theta, std::uint64_t) const {
  return linear_sim(x, theta);
}

double AssemblySimulator::evaluate(double x, std::span<const double> theta,
                                   std::uint64_t seed) const {
  if (!std::isfinite(x)) throw InvalidInput("assembly input must be finite");
  return assembly_sim(std::lround(x), AssemblyLineParams::from_span(theta), seed);
}

SimulatorPtr make_simulator(std::string_view name) {
  if (name == "linear") return std::make_shared<LinearSimulator>();
  if (name == "assembly") return std::make_shared<AssemblySimulator>();
  throw InvalidInput("unknown simulator '" + std::string(name) + "'");
}

std::vector<std::string> simulator_names() { return {"linear", "assembly"}; }

double piecewise_truth(double x, std::span<const double> theta_lo, std::span<const double> theta_hi,
                       double breakpoint, const Simulator& base, std::uint64_t seed) {
  if (!std::isfinite(breakpoint)) throw InvalidInput("piecewise breakpoint must be finite");
  return x < breakpoint ? base.evaluate(x, theta_lo, seed) : base.evaluate(x, theta_hi, seed);
}

RegressionFunction make_piecewise_truth(SimulatorPtr base, Eigen::VectorXd theta_lo,
                                        Eigen::VectorXd theta_hi, double breakpoint) {
  if (!std::isfinite(breakpoint)) throw InvalidInput("piecewise breakpoint must be finite");
  return [base = std::move(base), lo = std::move(theta_lo), hi = std::move(theta_hi),
          breakpoint](double x, std::uint64_t seed) {
    return piecewise_truth(x, {lo.data(), static_cast<std::size_t>(lo.size())},
                           {hi.data(), static_cast<std::size_t>(hi.size())}, breakpoint, *base,
                           seed);
  };
}

double NoiseSpec::stddev() const {
  if (!(variance >= 0.0) || !std::isfinite(variance))
    throw InvalidInput("noise variance must be finite and non-negative");
  return std::sqrt(variance);
}

Dataset generate_dataset(const DataGeneratingProcess& dgp, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("dataset size must be at least 1");
  if (!dgp.truth) throw InvalidInput("data generating process has no regression function");
  Dataset data;
  data.seed = seed;
  data.generator = dgp.description;
  data.xs.resize(static_cast<Eigen::Index>(n));
  data.ys.resize(static_cast<Eigen::Index>(n));

  Rng input_rng(derive_seed(seed, "inputs"));
  for (std::size_t i = 0; i < n; ++i) data.xs(static_cast<Eigen::Index>(i)) = dgp.input_density.sample(input_rng);

  const double noise_sd = dgp.noise.stddev();
  Rng noise_rng(derive_seed(seed, "noise"));
  std::normal_distribution<double> standard_normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double e = noise_sd * standard_normal(noise_rng);
    data.ys(idx) = dgp.truth(data.xs(idx), derive_seed(seed, "truth", {i})) + e;
  }
  return data;
}

}  // namespace shiftcal
