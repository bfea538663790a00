#include "shiftcal/kern.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "shiftcal/error.hpp"
#include "shiftcal/parallel.hpp"

namespace shiftcal {

ParamKernel::ParamKernel(double bandwidth_sq) : bandwidth_sq_(bandwidth_sq) {
  if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq))
    throw InvalidInput("parameter kernel bandwidth must be finite and positive");
}

double ParamKernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& a,
                               const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (a.size() != b.size()) throw DimensionMismatch("parameter vectors differ in dimension");
  return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth_sq_));
}

Eigen::MatrixXd ParamKernel::cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  if (a.cols() != b.cols()) throw DimensionMismatch("parameter vectors differ in dimension");
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() / (2.0 * bandwidth_sq_));
  return k;
}

double param_kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b, double bandwidth_sq) {
  return ParamKernel(bandwidth_sq)(a, b);
}

WeightedOutputKernel::WeightedOutputKernel(double bandwidth_sq, ImportanceWeights beta)
    : bandwidth_sq_(bandwidth_sq), beta_(std::move(beta)) {
  if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq))
    throw InvalidInput("output kernel bandwidth must be finite and positive");
}

double WeightedOutputKernel::weighted_sq_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                                                  const Eigen::Ref<const Eigen::VectorXd>& b) const {
  const auto n = beta_.values().size();
  if (a.size() != n || b.size() != n)
    throw DimensionMismatch("output vectors and importance weights differ in length");
  return (beta_.values().array() * (a - b).array().square()).sum();
}

double WeightedOutputKernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& a,
                                        const Eigen::Ref<const Eigen::VectorXd>& b) const {
  return std::exp(-weighted_sq_distance(a, b) / (2.0 * bandwidth_sq_));
}

double weighted_output_kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                                   const Eigen::Ref<const Eigen::VectorXd>& b,
                                   const ImportanceWeights& beta, double bandwidth_sq) {
  return WeightedOutputKernel(bandwidth_sq, beta)(a, b);
}

double median_heuristic(const Eigen::MatrixXd& points,
                        const std::optional<Eigen::VectorXd>& coordinate_weights) {
  const Eigen::Index m = points.rows();
  if (m < 2) throw DegenerateBandwidth("median heuristic needs at least two points");
  if (coordinate_weights && coordinate_weights->size() != points.cols())
    throw DimensionMismatch("median heuristic weights do not match the point dimension");

  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Eigen::ArrayXd diff2 = (points.row(i) - points.row(j)).array().square().transpose();
      distances.push_back(coordinate_weights ? (coordinate_weights->array() * diff2).sum()
                                             : diff2.sum());
    }
  }
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>((distances.size() - 1) / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  const double median = *mid;
  if (!(median > 0.0)) {
    const bool all_zero = std::all_of(distances.begin(), distances.end(),
                                      [](double d) { return d == 0.0; });
    throw DegenerateBandwidth(all_zero ? "all points coincide; bandwidth is undefined"
                                       : "median pairwise distance is zero");
  }
  return median;
}

GramSystem gram_and_rhs(const Eigen::MatrixXd& pseudo_outputs, const Eigen::VectorXd& observed,
                        const WeightedOutputKernel& kernel, double epsilon) {
  const auto n = static_cast<Eigen::Index>(kernel.dim());
  if (pseudo_outputs.cols() != n || observed.size() != n)
    throw DimensionMismatch("pseudo-outputs, observations and weights differ in length");
  const Eigen::Index m = pseudo_outputs.rows();
  GramSystem sys;
  sys.epsilon = epsilon;
  sys.gram.resize(m, m);
  sys.rhs.resize(m);

  // rows are evaluated independently, so the block split does not affect values
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    const Eigen::VectorXd yj = pseudo_outputs.row(j).transpose();
    sys.gram(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < m; ++k)
      sys.gram(j, k) = kernel(yj, pseudo_outputs.row(k).transpose());
    sys.rhs(j) = kernel(yj, observed);
  });
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = j + 1; k < m; ++k) sys.gram(k, j) = sys.gram(j, k);
  return sys;
}

Eigen::VectorXd regularized_solve(const GramSystem& system) {
  const Eigen::Index m = system.gram.rows();
  if (system.gram.cols() != m || system.rhs.size() != m)
    throw DimensionMismatch("Gram matrix and right-hand side sizes differ");
  if (!(system.epsilon > 0.0) || !std::isfinite(system.epsilon))
    throw InvalidInput("regularization constant must be finite and positive");
  if (!system.gram.allFinite() || !system.rhs.allFinite())
    throw NumericError("Gram system contains non-finite entries");

  Eigen::MatrixXd a = system.gram;
  a.diagonal().array() += static_cast<double>(m) * system.epsilon;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization failed");
  Eigen::VectorXd w = llt.solve(system.rhs);
  w += llt.solve(system.rhs - a * w);
  if (!w.allFinite()) throw NumericError("regularized solve produced non-finite weights");
  return w;
}

}  // namespace shiftcal
