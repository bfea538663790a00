#include "shiftcal/herd.hpp"

#include <cmath>

#include "shiftcal/error.hpp"
#include "shiftcal/parallel.hpp"

namespace shiftcal {

CandidatePool::CandidatePool(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw InvalidInput("candidate pool is empty");
  if (!points_.allFinite()) throw InvalidInput("candidate pool contains non-finite values");
}

CandidatePool default_pool(const PosteriorEmbedding& embedding, const Eigen::MatrixXd& extra) {
  if (extra.size() == 0) return CandidatePool(embedding.draws);
  if (extra.cols() != embedding.draws.cols())
    throw DimensionMismatch("extra candidates do not match the parameter dimension");
  Eigen::MatrixXd points(embedding.draws.rows() + extra.rows(), embedding.draws.cols());
  points << embedding.draws, extra;
  return CandidatePool(std::move(points));
}

HerdedSamples herd(const PosteriorEmbedding& embedding, const CandidatePool& pool, std::size_t steps) {
  if (steps < 1) throw InvalidInput("herding needs at least one step");
  if (pool.dim() != embedding.dim())
    throw DimensionMismatch("candidate pool dimension does not match the embedding");
  const auto& points = pool.points();
  const Eigen::Index p = points.rows();

  Eigen::VectorXd mean_embedding(p);
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    mean_embedding(r) = embedding_eval(embedding, points.row(r).transpose());
  });

  HerdedSamples out;
  out.pool = points;
  out.samples.resize(static_cast<Eigen::Index>(steps), points.cols());
  out.pool_indices.reserve(steps);
  out.objective.reserve(steps);

  // repulsion(r) = sum over chosen samples of k(pool_r, sample)
  Eigen::VectorXd repulsion = Eigen::VectorXd::Zero(p);
  for (std::size_t t = 1; t <= steps; ++t) {
    const double inv_t = 1.0 / static_cast<double>(t);
    Eigen::Index best = 0;
    double best_value = mean_embedding(0) - inv_t * repulsion(0);
    for (Eigen::Index r = 1; r < p; ++r) {
      const double value = mean_embedding(r) - inv_t * repulsion(r);
      if (value > best_value) {
        best_value = value;
        best = r;
      }
    }
    out.samples.row(static_cast<Eigen::Index>(t - 1)) = points.row(best);
    out.pool_indices.push_back(static_cast<std::size_t>(best));
    out.objective.push_back(best_value);

    const Eigen::VectorXd chosen = points.row(best).transpose();
    for (Eigen::Index r = 0; r < p; ++r) repulsion(r) += embedding.kernel(points.row(r).transpose(), chosen);
  }
  return out;
}

std::vector<double> herding_mmd_curve(const PosteriorEmbedding& embedding,
                                      const HerdedSamples& samples) {
  const auto& atoms = embedding.draws;
  const auto& w = embedding.weights;
  const Eigen::Index steps = samples.samples.rows();
  const auto& kernel = embedding.kernel;

  const double self_term = w.dot(kernel.cross(atoms, atoms) * w);
  const Eigen::MatrixXd atom_sample = kernel.cross(atoms, samples.samples);  // m x T
  const Eigen::VectorXd cross_per_sample = atom_sample.transpose() * w;      // sum_j w_j k(atom_j, s)

  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(steps));
  double cross_sum = 0.0;
  double sample_sum = 0.0;  // sum_{s, s' <= t} k(s, s')
  for (Eigen::Index t = 0; t < steps; ++t) {
    cross_sum += cross_per_sample(t);
    double row = 0.0;
    for (Eigen::Index s = 0; s < t; ++s)
      row += kernel(samples.samples.row(s).transpose(), samples.samples.row(t).transpose());
    sample_sum += 2.0 * row + 1.0;
    const double tt = static_cast<double>(t + 1);
    const double sq = self_term - 2.0 * cross_sum / tt + sample_sum / (tt * tt);
    curve.push_back(std::sqrt(std::max(0.0, sq)));
  }
  return curve;
}

double herding_mmd(const PosteriorEmbedding& embedding, const HerdedSamples& samples, std::size_t t) {
  if (t < 1 || t > samples.size()) throw InvalidInput("herding prefix length out of range");
  HerdedSamples prefix;
  prefix.samples = samples.samples.topRows(static_cast<Eigen::Index>(t));
  return herding_mmd_curve(embedding, prefix).back();
}

}  // namespace shiftcal
