#include "shiftcal/baseline.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "shiftcal/error.hpp"

namespace shiftcal {

void MHConfig::validate() const {
  if (!(proposal_std > 0.0) || !std::isfinite(proposal_std))
    throw InvalidInput("mh.proposal_std must be positive");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw InvalidInput("mh.burn_in must lie in [0, 1)");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var))
    throw InvalidInput("mh.noise_var must be positive");
  if (steps < 1) throw InvalidInput("mh.steps must be at least 1");
}

double MHTrace::acceptance_ratio() const noexcept {
  return accepted.empty() ? 0.0
                          : static_cast<double>(accepted_count) / static_cast<double>(accepted.size());
}

Eigen::MatrixXd MHTrace::post_burn_in() const {
  const auto keep = states.rows() - static_cast<Eigen::Index>(burn_in_steps);
  return states.bottomRows(std::max<Eigen::Index>(keep, 0));
}

double weighted_log_likelihood(const Eigen::VectorXd& theta, const Dataset& data,
                               const ImportanceWeights& beta, const Simulator& sim,
                               double noise_var, std::uint64_t seed) {
  if (!(noise_var > 0.0)) throw InvalidInput("noise variance must be positive");
  if (beta.size() != data.size()) throw DimensionMismatch("weights and dataset differ in length");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.xs.size(); ++i) {
    const double r = data.ys(i) -
                     sim.evaluate(data.xs(i), theta, derive_seed(seed, "likelihood", {static_cast<std::uint64_t>(i)}));
    sum += beta.values()(i) * r * r;
  }
  return -sum / (2.0 * noise_var);
}

MHTrace mh_sample(const LogTarget& log_target, const Eigen::VectorXd& init, const MHConfig& cfg) {
  cfg.validate();
  Eigen::VectorXd current = init;
  double current_lp = log_target(current, 0);
  if (!std::isfinite(current_lp)) throw InvalidInput("log target is not finite at the initial point");

  Rng rng(derive_seed(cfg.seed, "mh"));
  std::normal_distribution<double> step_dist(0.0, cfg.proposal_std);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MHTrace trace;
  trace.states.resize(static_cast<Eigen::Index>(cfg.steps), init.size());
  trace.accepted.reserve(cfg.steps);
  trace.burn_in_steps = static_cast<std::size_t>(std::floor(static_cast<double>(cfg.steps) * cfg.burn_in));

  Eigen::VectorXd proposal(init.size());
  for (std::size_t s = 0; s < cfg.steps; ++s) {
    for (Eigen::Index k = 0; k < proposal.size(); ++k) proposal(k) = current(k) + step_dist(rng);
    const double u = unit(rng);
    const double lp = log_target(proposal, s + 1);
    const bool accept = lp > -std::numeric_limits<double>::infinity() &&
                        (lp >= current_lp || std::log(u) < lp - current_lp);
    if (accept) {
      current = proposal;
      current_lp = lp;
      ++trace.accepted_count;
    }
    trace.accepted.push_back(accept);
    trace.states.row(static_cast<Eigen::Index>(s)) = current.transpose();
  }
  return trace;
}

std::size_t simulation_budget(const MHTrace& trace) { return trace.steps(); }

std::size_t simulation_budget(std::span<const MHTrace> traces) {
  std::size_t total = 0;
  for (const auto& t : traces) total += t.steps();
  return total;
}

}  // namespace shiftcal
