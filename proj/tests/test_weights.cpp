#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "shiftcal/error.hpp"
#include "shiftcal/weights.hpp"

using namespace shiftcal;

namespace {

// Independent density implementation for the ratio oracle.
double gauss_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-z * z / 2) / (sd * std::sqrt(2 * std::numbers::pi));
}

}  // namespace

TEST_CASE("density evaluation") {
  CHECK(density_eval(DensitySpec::normal(0, 1), 0) == doctest::Approx(0.3989422804014327));
  CHECK(density_eval(DensitySpec::uniform(0, 2), 1) == 0.5);
  CHECK(density_eval(DensitySpec::uniform(0, 2), 3) == 0.0);
  CHECK(DensitySpec::normal_from_variance(1, 4).second() == 2.0);
  CHECK_THROWS_AS(DensitySpec::normal(0, -1), InvalidInput);
  CHECK_THROWS_AS(DensitySpec::uniform(2, 1), InvalidInput);
}

TEST_CASE("importance weights") {
  Eigen::VectorXd xs(4);
  xs << -1.0, 0.0, 0.3, 2.5;
  SUBCASE("identical densities give unit weights") {
    const auto q = DensitySpec::normal(0.5, 0.5);
    const auto b = importance_weights(xs, q, q);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i] == 1.0);
  }
  SUBCASE("benchmark densities at the origin") {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    const auto b = importance_weights(zero, DensitySpec::normal(0.5, 0.5), DensitySpec::normal(0, 0.3));
    const double oracle = (1 / (0.3 * std::sqrt(2 * std::numbers::pi))) /
                          ((1 / (0.5 * std::sqrt(2 * std::numbers::pi))) * std::exp(-0.5));
    CHECK(b[0] == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(b[0] == doctest::Approx(5.0 / 3.0 * std::exp(0.5)).epsilon(1e-14));
  }
  SUBCASE("uniform training density vanishing at an input is reported by index") {
    try {
      importance_weights(xs, DensitySpec::uniform(-2, 1), DensitySpec::normal(0, 1));
      FAIL("expected DegenerateWeight");
    } catch (const DegenerateWeight& e) {
      CHECK(e.index() == 3);
    }
  }
  SUBCASE("test density vanishing is rejected unless allowed") {
    CHECK_THROWS_AS(importance_weights(xs, DensitySpec::normal(0, 1), DensitySpec::uniform(-0.5, 0.5)),
                    DegenerateWeight);
    const auto b = importance_weights(xs, DensitySpec::normal(0, 1), DensitySpec::uniform(-0.5, 0.5),
                                      {.allow_zero = true, .warn_extreme = false});
    CHECK(b[0] == 0.0);
    CHECK(b[1] > 0.0);
  }
}

TEST_CASE("importance weights match an independent density ratio") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.3, 0.6);
  Eigen::VectorXd xs(500);
  for (auto& x : xs) x = nd(rng);
  const auto b = importance_weights(xs, DensitySpec::normal(0.5, 0.5), DensitySpec::normal(0, 0.3),
                                    {.warn_extreme = false});
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double oracle = gauss_pdf(xs(i), 0, 0.3) / gauss_pdf(xs(i), 0.5, 0.5);
    CHECK(std::abs(b[static_cast<std::size_t>(i)] - oracle) <= 1e-12 * oracle);
  }
}

TEST_CASE("ordinary weights") {
  CHECK(ordinary_weights(1).values() == Eigen::VectorXd::Ones(1));
  CHECK(ordinary_weights(3).values() == Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(ordinary_weights(0), InvalidInput);
  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(7, -3, 3);
  for (const auto& q : {DensitySpec::normal(0, 2), DensitySpec::uniform(-3, 3)})
    CHECK(importance_weights(xs, q, q).values() == ordinary_weights(7).values());
}

TEST_CASE("weights are validated on construction") {
  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ImportanceWeights{bad}, DegenerateWeight);
  bad << 1.0, -1.0;
  CHECK_THROWS_AS(ImportanceWeights{bad}, DegenerateWeight);
  Eigen::VectorXd extreme(3);
  extreme << 1e-13, 1.0, 1e13;
  const ImportanceWeights w(extreme);
  CHECK(w.extreme_indices() == std::vector<std::size_t>{0, 2});
}
