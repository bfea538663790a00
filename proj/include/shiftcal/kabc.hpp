#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>

#include "shiftcal/kern.hpp"
#include "shiftcal/rng.hpp"
#include "shiftcal/sim.hpp"
#include "shiftcal/weights.hpp"

namespace shiftcal {

/// Prior over parameters: a diagonal Gaussian or a uniform box.
class PriorSpec {
 public:
  enum class Family { diagonal_normal, uniform_box };

  static PriorSpec diagonal_normal(Eigen::VectorXd mean, const Eigen::VectorXd& variances);
  static PriorSpec uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Family family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(first_.size()); }
  /// Mean (normal) or lower bounds (box).
  const Eigen::VectorXd& first() const noexcept { return first_; }
  /// Standard deviations (normal) or upper bounds (box).
  const Eigen::VectorXd& second() const noexcept { return second_; }

  Eigen::VectorXd sample(Rng& rng) const;
  bool in_support(const Eigen::VectorXd& theta) const;
  /// Log density up to an additive constant; -inf outside the support.
  double log_density(const Eigen::VectorXd& theta) const;
  /// Prior mean, or the box center.
  Eigen::VectorXd center() const;
  /// A bounded search region: the box itself, or mean +/- `width` stddevs.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> search_box(double width = 4.0) const;

 private:
  PriorSpec(Family f, Eigen::VectorXd a, Eigen::VectorXd b)
      : family_(f), first_(std::move(a)), second_(std::move(b)) {}
  Family family_;
  Eigen::VectorXd first_;
  Eigen::VectorXd second_;
};

/// m i.i.d. prior draws, one per row.
Eigen::MatrixXd sample_prior(const PriorSpec& prior, std::size_t m, std::uint64_t seed);

/// Row j holds r(X_i, theta_j) for every training input X_i (m x n). Each
/// cell uses its own seed derived from (seed, j, i).
Eigen::MatrixXd simulate_pseudo_outputs(const Simulator& sim, const Eigen::MatrixXd& draws,
                                        const Eigen::VectorXd& xs, std::uint64_t seed);

/// Empirical posterior kernel mean sum_j w_j k(., theta_j). Weights are kept
/// exactly as solved: they can be negative and need not sum to one.
struct PosteriorEmbedding {
  Eigen::MatrixXd draws;
  Eigen::VectorXd weights;
  ParamKernel kernel{1.0};
  double output_bandwidth_sq = 0.0;
  double epsilon = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(draws.cols()); }
};

PosteriorEmbedding build_embedding(const Eigen::MatrixXd& draws, const Eigen::MatrixXd& pseudo,
                                   const Eigen::VectorXd& observed, const ImportanceWeights& beta,
                                   double output_bandwidth_sq, double param_bandwidth_sq,
                                   double epsilon);

double embedding_eval(const PosteriorEmbedding& embedding, const Eigen::Ref<const Eigen::VectorXd>& theta);

/// RKHS distance between two embeddings that share the same atoms.
double embedding_distance(const PosteriorEmbedding& a, const PosteriorEmbedding& b);

/// epsilon_m = C * m^(-b / (1 + 4b)).
double regularization_schedule(std::size_t m, double decay, double constant);

nlohmann::json embedding_to_json(const PosteriorEmbedding& embedding);
PosteriorEmbedding embedding_from_json(const nlohmann::json& j);

}  // namespace shiftcal
