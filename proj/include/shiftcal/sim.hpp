#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftcal/weights.hpp"

namespace shiftcal {

/// Black-box simulator r(x, theta). Implementations must be deterministic in
/// (x, theta, seed) and safe to call concurrently.
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual std::string name() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual bool stochastic() const { return false; }
  virtual double evaluate(double x, std::span<const double> theta, std::uint64_t seed) const = 0;

  double evaluate(double x, const Eigen::VectorXd& theta, std::uint64_t seed) const {
    return evaluate(x, std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())),
                    seed);
  }
};

using SimulatorPtr = std::shared_ptr<const Simulator>;

double linear_sim(double x, std::span<const double> theta);
double cubic_truth(double x);

/// Parameters of the two-stage assembly/inspection line.
struct AssemblyLineParams {
  double assembly_mean;       // mean assembly time per product
  double assembly_spread;     // stddev of assembly time
  double inspection_mean;     // mean inspection time per batch
  double inspection_spread;   // stddev of inspection time

  static AssemblyLineParams from_span(std::span<const double> theta);
};

inline constexpr int kInspectionBatch = 4;

/// Makespan of `products` items through ASSEMBLY -> batched INSPECTION.
/// Service times are normal draws clamped at zero; the final partial batch is
/// inspected as soon as its last product is assembled.
double assembly_sim(long products, const AssemblyLineParams& theta, std::uint64_t seed);

class LinearSimulator final : public Simulator {
 public:
  std::string name() const override { return "linear"; }
  std::size_t param_dim() const override { return 2; }
  using Simulator::evaluate;
  double evaluate(double x, std::span<const double> theta, std::uint64_t seed) const override;
};

/// Wraps assembly_sim; real inputs are rounded to the nearest product count.
class AssemblySimulator final : public Simulator {
 public:
  std::string name() const override { return "assembly"; }
  std::size_t param_dim() const override { return 4; }
  bool stochastic() const override { return true; }
  using Simulator::evaluate;
  double evaluate(double x, std::span<const double> theta, std::uint64_t seed) const override;
};

/// Registry lookup by name ("linear", "assembly"). Throws InvalidInput.
SimulatorPtr make_simulator(std::string_view name);
std::vector<std::string> simulator_names();

/// Noise-free system response R(x); the seed feeds stochastic truths.
using RegressionFunction = std::function<double(double x, std::uint64_t seed)>;

double piecewise_truth(double x, std::span<const double> theta_lo, std::span<const double> theta_hi,
                       double breakpoint, const Simulator& base, std::uint64_t seed);

RegressionFunction make_piecewise_truth(SimulatorPtr base, Eigen::VectorXd theta_lo,
                                        Eigen::VectorXd theta_hi, double breakpoint);

/// Zero-mean Gaussian noise described by its variance.
struct NoiseSpec {
  double variance = 0.0;
  double stddev() const;
};

struct DataGeneratingProcess {
  RegressionFunction truth;
  NoiseSpec noise;
  DensitySpec input_density = DensitySpec::normal(0.0, 1.0);
  std::string description;
};

struct Dataset {
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;
  std::uint64_t seed = 0;
  std::string generator;

  std::size_t size() const noexcept { return static_cast<std::size_t>(xs.size()); }
};

/// Draws n inputs from q0 and sets y_i = R(x_i) + e_i.
Dataset generate_dataset(const DataGeneratingProcess& dgp, std::size_t n, std::uint64_t seed);

}  // namespace shiftcal
