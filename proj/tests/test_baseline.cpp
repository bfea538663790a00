#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shiftcal/baseline.hpp"
#include "shiftcal/error.hpp"
#include "shiftcal/kabc.hpp"

using namespace shiftcal;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("weighted log-likelihood") {
  const LinearSimulator lin;
  Dataset d;
  d.xs = vec({0, 1, 2});
  d.ys = vec({1, 3, 5});
  const auto ones = ordinary_weights(3);
  CHECK(weighted_log_likelihood(vec({1, 2}), d, ones, lin, 1.0, 0) == 0.0);

  Dataset one;
  one.xs = vec({0});
  one.ys = vec({1});
  CHECK(weighted_log_likelihood(vec({0, 0}), one, ordinary_weights(1), lin, 0.5, 0) == -1.0);

  const ImportanceWeights b(vec({0.2, 1.5, 3}));
  const ImportanceWeights b2(vec({0.4, 3, 6}));
  const double l1 = weighted_log_likelihood(vec({0, 1}), d, b, lin, 2.0, 0);
  CHECK(weighted_log_likelihood(vec({0, 1}), d, b2, lin, 2.0, 0) == doctest::Approx(2 * l1).epsilon(1e-15));
  CHECK_THROWS_AS(weighted_log_likelihood(vec({0, 1}), d, b, lin, 0.0, 0), InvalidInput);
}

TEST_CASE("tiny proposals are nearly always accepted") {
  const LogTarget target = [](const Eigen::VectorXd& th, std::size_t) { return -0.5 * th.squaredNorm(); };
  const auto tr = mh_sample(target, vec({0.1}), {.proposal_std = 1e-9, .steps = 500, .seed = 1});
  CHECK(tr.acceptance_ratio() > 0.99);
  CHECK(std::abs(tr.states(499, 0) - 0.1) < 1e-6);
}

TEST_CASE("flat target inside a box accepts every proposal") {
  const auto box = PriorSpec::uniform_box(vec({-100}), vec({100}));
  const LogTarget target = [&](const Eigen::VectorXd& th, std::size_t) { return box.log_density(th); };
  const auto tr = mh_sample(target, vec({0}), {.proposal_std = 0.01, .steps = 1000, .seed = 4});
  CHECK(tr.acceptance_ratio() == 1.0);
}

TEST_CASE("proposals outside a bounded support are rejected") {
  const auto box = PriorSpec::uniform_box(vec({0}), vec({1}));
  const LogTarget target = [&](const Eigen::VectorXd& th, std::size_t) { return box.log_density(th); };
  const auto tr = mh_sample(target, vec({0.5}), {.proposal_std = 2.0, .steps = 2000, .seed = 4});
  CHECK(tr.states.minCoeff() >= 0.0);
  CHECK(tr.states.maxCoeff() <= 1.0);
  CHECK(tr.acceptance_ratio() < 0.6);
}

TEST_CASE("standard normal target") {
  const LogTarget target = [](const Eigen::VectorXd& th, std::size_t) { return -0.5 * th.squaredNorm(); };
  const auto tr = mh_sample(target, vec({0}), {.proposal_std = 2.4, .steps = 100000, .seed = 2024});
  const auto post = tr.post_burn_in();
  CHECK(post.rows() == 90000);
  const double mean = post.mean();
  const double var = (post.array() - mean).square().sum() / static_cast<double>(post.rows() - 1);
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1) < 0.1);
}

TEST_CASE("chains are reproducible") {
  const LogTarget target = [](const Eigen::VectorXd& th, std::size_t) { return -th.squaredNorm(); };
  const MHConfig cfg{.proposal_std = 0.7, .steps = 300, .seed = 77};
  const auto a = mh_sample(target, vec({1, -1}), cfg), b = mh_sample(target, vec({1, -1}), cfg);
  CHECK(a.accepted == b.accepted);
  CHECK(a.states == b.states);
}

TEST_CASE("simulation budget") {
  const LogTarget target = [](const Eigen::VectorXd& th, std::size_t) { return -th.squaredNorm(); };
  const auto tr = mh_sample(target, vec({0}), {.proposal_std = 0.5, .steps = 100, .burn_in = 0.1, .seed = 3});
  CHECK(simulation_budget(tr) == 100);
  CHECK(tr.post_burn_in().rows() == 90);
  const std::vector<MHTrace> two{tr, tr};
  CHECK(simulation_budget(two) == 200);
}

TEST_CASE("invalid configurations") {
  const LogTarget target = [](const Eigen::VectorXd& th, std::size_t) { return -th.squaredNorm(); };
  CHECK_THROWS_AS(mh_sample(target, vec({0}), {.proposal_std = 0}), InvalidInput);
  CHECK_THROWS_AS(mh_sample(target, vec({0}), {.burn_in = 1.0}), InvalidInput);
  const LogTarget dead = [](const Eigen::VectorXd&, std::size_t) { return -INFINITY; };
  CHECK_THROWS_AS(mh_sample(dead, vec({0}), {}), InvalidInput);
}

TEST_CASE("weighted posterior mean approaches weighted least squares") {
  const LinearSimulator lin;
  auto dgp = DataGeneratingProcess{[](double x, std::uint64_t) { return cubic_truth(x); }, {2.0},
                                   DensitySpec::normal(0.5, 0.5), "cubic"};
  const auto data = generate_dataset(dgp, 100, 11);
  const auto beta = importance_weights(data.xs, DensitySpec::normal(0.5, 0.5), DensitySpec::normal(0, 0.3),
                                       {.warn_extreme = false});
  const auto prior = PriorSpec::diagonal_normal(vec({0, 0}), vec({5, 5}));
  const LogTarget target = [&](const Eigen::VectorXd& th, std::size_t) {
    return prior.log_density(th) + weighted_log_likelihood(th, data, beta, lin, 2.0, 0);
  };
  const auto tr = mh_sample(target, prior.center(), {.proposal_std = 0.3, .steps = 50000, .noise_var = 2.0, .seed = 8});
  const auto post = tr.post_burn_in();
  const Eigen::RowVectorXd mean = post.colwise().mean();
  const Eigen::MatrixXd centered = post.rowwise() - mean;
  const Eigen::VectorXd sd = (centered.array().square().colwise().sum() / static_cast<double>(post.rows() - 1)).sqrt();
  const auto w = oracle::wls(data.xs, data.ys, beta.values());
  for (int c = 0; c < 2; ++c) CHECK(std::abs(mean(c) - w(c)) <= 3 * sd(c));
}
