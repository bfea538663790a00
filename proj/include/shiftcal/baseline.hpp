#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shiftcal/sim.hpp"
#include "shiftcal/weights.hpp"

namespace shiftcal {

struct MHConfig {
  double proposal_std = 0.06;
  std::size_t steps = 1000;
  double burn_in = 0.10;
  double noise_var = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MHTrace {
  Eigen::MatrixXd states;       // state after each step (S x d)
  std::vector<bool> accepted;   // per step
  std::size_t accepted_count = 0;
  std::size_t burn_in_steps = 0;

  std::size_t steps() const noexcept { return accepted.size(); }
  double acceptance_ratio() const noexcept;
  /// States after the first floor(S * burn_in) steps.
  Eigen::MatrixXd post_burn_in() const;
};

/// -sum_i beta_i (Y_i - r(X_i, theta))^2 / (2 noise_var). Simulator calls for
/// input i use derive(seed, "likelihood", i).
double weighted_log_likelihood(const Eigen::VectorXd& theta, const Dataset& data,
                               const ImportanceWeights& beta, const Simulator& sim,
                               double noise_var, std::uint64_t seed);

/// Log target evaluated at (theta, step index). The step index lets stochastic
/// targets draw a fresh, reproducible seed per evaluation.
using LogTarget = std::function<double(const Eigen::VectorXd& theta, std::size_t step)>;

/// Random-walk Metropolis-Hastings with an isotropic Gaussian proposal. A
/// proposal whose target is -inf (outside a bounded prior) is rejected.
/// Throws InvalidInput when the target at the initial point is not finite.
MHTrace mh_sample(const LogTarget& log_target, const Eigen::VectorXd& init, const MHConfig& cfg);

/// Number of simulator sweeps consumed: every step, including burn-in and
/// rejected proposals.
std::size_t simulation_budget(const MHTrace& trace);
std::size_t simulation_budget(std::span<const MHTrace> traces);

}  // namespace shiftcal
