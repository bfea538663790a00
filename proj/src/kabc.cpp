#include "shiftcal/kabc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "shiftcal/error.hpp"
#include "shiftcal/parallel.hpp"

namespace shiftcal {

PriorSpec PriorSpec::diagonal_normal(Eigen::VectorXd mean, const Eigen::VectorXd& variances) {
  if (mean.size() == 0 || mean.size() != variances.size())
    throw DimensionMismatch("prior mean and variances differ in dimension");
  if (!mean.allFinite() || !variances.allFinite() || (variances.array() < 0.0).any())
    throw InvalidInput("prior variances must be finite and non-negative");
  return PriorSpec(Family::diagonal_normal, std::move(mean), variances.array().sqrt().matrix());
}

PriorSpec PriorSpec::uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw DimensionMismatch("prior bounds differ in dimension");
  if (!lower.allFinite() || !upper.allFinite() || (lower.array() > upper.array()).any())
    throw InvalidInput("prior box bounds must be finite and ordered");
  return PriorSpec(Family::uniform_box, std::move(lower), std::move(upper));
}

Eigen::VectorXd PriorSpec::sample(Rng& rng) const {
  Eigen::VectorXd theta(first_.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    if (family_ == Family::diagonal_normal) {
      std::normal_distribution<double> dist(0.0, 1.0);
      theta(k) = first_(k) + second_(k) * dist(rng);
    } else {
      std::uniform_real_distribution<double> dist(0.0, 1.0);
      theta(k) = first_(k) + (second_(k) - first_(k)) * dist(rng);
    }
  }
  return theta;
}

bool PriorSpec::in_support(const Eigen::VectorXd& theta) const {
  if (theta.size() != first_.size() || !theta.allFinite()) return false;
  if (family_ == Family::diagonal_normal) return true;
  return (theta.array() >= first_.array()).all() && (theta.array() <= second_.array()).all();
}

double PriorSpec::log_density(const Eigen::VectorXd& theta) const {
  if (theta.size() != first_.size()) throw DimensionMismatch("prior dimension mismatch");
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  if (family_ == Family::uniform_box) return 0.0;
  double lp = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    if (second_(k) == 0.0) {
      if (theta(k) != first_(k)) return -std::numeric_limits<double>::infinity();
      continue;
    }
    const double z = (theta(k) - first_(k)) / second_(k);
    lp -= 0.5 * z * z;
  }
  return lp;
}

Eigen::VectorXd PriorSpec::center() const {
  return family_ == Family::diagonal_normal ? first_ : Eigen::VectorXd(0.5 * (first_ + second_));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> PriorSpec::search_box(double width) const {
  if (family_ == Family::uniform_box) return {first_, second_};
  return {first_ - width * second_, first_ + width * second_};
}

Eigen::MatrixXd sample_prior(const PriorSpec& prior, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw InvalidInput("need at least one prior draw");
  Rng rng(derive_seed(seed, "prior"));
  Eigen::MatrixXd draws(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(prior.dim()));
  for (Eigen::Index j = 0; j < draws.rows(); ++j) draws.row(j) = prior.sample(rng).transpose();
  return draws;
}

Eigen::MatrixXd simulate_pseudo_outputs(const Simulator& sim, const Eigen::MatrixXd& draws,
                                        const Eigen::VectorXd& xs, std::uint64_t seed) {
  if (static_cast<std::size_t>(draws.cols()) != sim.param_dim())
    throw DimensionMismatch("prior draws do not match the simulator parameter dimension");
  Eigen::MatrixXd out(draws.rows(), xs.size());
  parallel_for(static_cast<std::size_t>(draws.rows()), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    const Eigen::VectorXd theta = draws.row(j).transpose();
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      try {
        out(j, i) = sim.evaluate(xs(i), theta,
                                 derive_seed(seed, "pseudo", {jj, static_cast<std::uint64_t>(i)}));
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "simulator '" << sim.name() << "' failed at input " << i << ", draw " << j << ": "
           << e.what();
        throw Error(os.str());
      }
    }
  });
  return out;
}

PosteriorEmbedding build_embedding(const Eigen::MatrixXd& draws, const Eigen::MatrixXd& pseudo,
                                   const Eigen::VectorXd& observed, const ImportanceWeights& beta,
                                   double output_bandwidth_sq, double param_bandwidth_sq,
                                   double epsilon) {
  if (draws.rows() != pseudo.rows())
    throw DimensionMismatch("prior draws and pseudo-outputs differ in count");
  if (!pseudo.allFinite()) throw NumericError("pseudo-outputs contain non-finite values");
  const WeightedOutputKernel kernel(output_bandwidth_sq, beta);
  const GramSystem sys = gram_and_rhs(pseudo, observed, kernel, epsilon);
  PosteriorEmbedding emb;
  emb.draws = draws;
  emb.weights = regularized_solve(sys);
  emb.kernel = ParamKernel(param_bandwidth_sq);
  emb.output_bandwidth_sq = output_bandwidth_sq;
  emb.epsilon = epsilon;
  return emb;
}

double embedding_eval(const PosteriorEmbedding& embedding,
                      const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != embedding.draws.cols())
    throw DimensionMismatch("query parameter dimension does not match the embedding");
  double value = 0.0;
  for (Eigen::Index j = 0; j < embedding.weights.size(); ++j)
    value += embedding.weights(j) * embedding.kernel(theta, embedding.draws.row(j).transpose());
  return value;
}

double embedding_distance(const PosteriorEmbedding& a, const PosteriorEmbedding& b) {
  if (a.draws.rows() != b.draws.rows() || a.draws != b.draws)
    throw InvalidInput("embedding distance needs the same atoms on both sides");
  const Eigen::VectorXd diff = a.weights - b.weights;
  const Eigen::MatrixXd k = a.kernel.cross(a.draws, a.draws);
  return std::sqrt(std::max(0.0, diff.dot(k * diff)));
}

double regularization_schedule(std::size_t m, double decay, double constant) {
  if (m < 1) throw InvalidInput("schedule needs m >= 1");
  if (!(decay > 1.0)) throw InvalidInput("eigenvalue decay exponent must exceed 1");
  if (!(constant > 0.0)) throw InvalidInput("schedule constant must be positive");
  return constant * std::pow(static_cast<double>(m), -decay / (1.0 + 4.0 * decay));
}

nlohmann::json embedding_to_json(const PosteriorEmbedding& embedding) {
  nlohmann::json draws = nlohmann::json::array();
  for (Eigen::Index j = 0; j < embedding.draws.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < embedding.draws.cols(); ++k) row.push_back(embedding.draws(j, k));
    draws.push_back(std::move(row));
  }
  return {{"draws", std::move(draws)},
          {"weights", std::vector<double>(embedding.weights.data(),
                                          embedding.weights.data() + embedding.weights.size())},
          {"param_bandwidth_sq", embedding.kernel.bandwidth_sq()},
          {"output_bandwidth_sq", embedding.output_bandwidth_sq},
          {"epsilon", embedding.epsilon}};
}

PosteriorEmbedding embedding_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("draws");
  const auto weights = j.at("weights").get<std::vector<double>>();
  if (rows.size() != weights.size()) throw InvalidInput("embedding draws and weights differ in count");
  PosteriorEmbedding emb;
  const auto d = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  emb.draws.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != d)
      throw DimensionMismatch("embedding draws have inconsistent dimension");
    for (Eigen::Index k = 0; k < d; ++k)
      emb.draws(static_cast<Eigen::Index>(r), k) = rows[r][static_cast<std::size_t>(k)].get<double>();
  }
  emb.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  emb.kernel = ParamKernel(j.at("param_bandwidth_sq").get<double>());
  emb.output_bandwidth_sq = j.value("output_bandwidth_sq", 0.0);
  emb.epsilon = j.value("epsilon", 0.0);
  return emb;
}

}  // namespace shiftcal
