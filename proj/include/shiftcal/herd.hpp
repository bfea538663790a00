#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shiftcal/kabc.hpp"

namespace shiftcal {

/// Finite set of parameter vectors (one per row) over which herding maximizes.
class CandidatePool {
 public:
  explicit CandidatePool(Eigen::MatrixXd points);

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }

 private:
  Eigen::MatrixXd points_;
};

/// Embedding atoms, optionally followed by extra candidate rows.
CandidatePool default_pool(const PosteriorEmbedding& embedding,
                           const Eigen::MatrixXd& extra = Eigen::MatrixXd());

struct HerdedSamples {
  Eigen::MatrixXd samples;               // T x d, in herding order
  std::vector<std::size_t> pool_indices; // row of the pool chosen at each step
  std::vector<double> objective;         // maximized objective at each step
  Eigen::MatrixXd pool;

  std::size_t size() const noexcept { return static_cast<std::size_t>(samples.rows()); }
};

/// Kernel herding against the posterior embedding:
///   step 1:   argmax_p mu(p)
///   step t>1: argmax_p mu(p) - (1/t) sum_{s<t} k(p, sample_s)
/// Ties go to the lowest pool index. Samples may repeat.
HerdedSamples herd(const PosteriorEmbedding& embedding, const CandidatePool& pool, std::size_t steps);

/// ||mu - (1/t) sum_{s<=t} k(., sample_s)|| in the parameter RKHS.
double herding_mmd(const PosteriorEmbedding& embedding, const HerdedSamples& samples, std::size_t t);

/// herding_mmd for every prefix t = 1..T in one pass.
std::vector<double> herding_mmd_curve(const PosteriorEmbedding& embedding, const HerdedSamples& samples);

}  // namespace shiftcal
