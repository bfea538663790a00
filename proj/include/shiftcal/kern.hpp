#pragma once

#include <Eigen/Dense>
#include <optional>

#include "shiftcal/weights.hpp"

namespace shiftcal {

/// Gaussian kernel on parameter space, exp(-|a - b|^2 / (2 sigma^2)).
class ParamKernel {
 public:
  explicit ParamKernel(double bandwidth_sq);

  double bandwidth_sq() const noexcept { return bandwidth_sq_; }
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) const;
  /// Kernel matrix between the rows of `a` and the rows of `b`.
  Eigen::MatrixXd cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

 private:
  double bandwidth_sq_;
};

double param_kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b, double bandwidth_sq);

/// Importance-weighted Gaussian kernel on R^n:
///   k(Y, Y') = exp(-(1 / 2 sigma^2) * sum_i beta_i (Y_i - Y'_i)^2)
class WeightedOutputKernel {
 public:
  WeightedOutputKernel(double bandwidth_sq, ImportanceWeights beta);

  double bandwidth_sq() const noexcept { return bandwidth_sq_; }
  const ImportanceWeights& beta() const noexcept { return beta_; }
  std::size_t dim() const noexcept { return beta_.size(); }

  double weighted_sq_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                              const Eigen::Ref<const Eigen::VectorXd>& b) const;
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) const;

 private:
  double bandwidth_sq_;
  ImportanceWeights beta_;
};

double weighted_output_kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                                   const Eigen::Ref<const Eigen::VectorXd>& b,
                                   const ImportanceWeights& beta, double bandwidth_sq);

/// Median of the pairwise squared distances between the rows of `points`
/// (lower median for an even pair count), optionally beta-weighted per
/// coordinate. Throws DegenerateBandwidth when every pair coincides.
double median_heuristic(const Eigen::MatrixXd& points,
                        const std::optional<Eigen::VectorXd>& coordinate_weights = std::nullopt);

struct GramSystem {
  Eigen::MatrixXd gram;  // symmetric m x m
  Eigen::VectorXd rhs;   // k(Ybar_j, Y) for each j
  double epsilon = 0.0;

  Eigen::Index size() const noexcept { return gram.rows(); }
};

/// Builds G and the right-hand side from m pseudo-output rows (m x n) and the
/// observed vector. G is filled from its upper triangle so it is exactly symmetric.
GramSystem gram_and_rhs(const Eigen::MatrixXd& pseudo_outputs, const Eigen::VectorXd& observed,
                        const WeightedOutputKernel& kernel, double epsilon);

/// Solves (G + m eps I) w = rhs by Cholesky with one refinement step.
/// Throws NumericError on non-finite input or a failed factorization.
Eigen::VectorXd regularized_solve(const GramSystem& system);

}  // namespace shiftcal
