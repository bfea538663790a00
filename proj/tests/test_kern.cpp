#include <doctest.h>

#include <cmath>
#include <random>

#include "shiftcal/error.hpp"
#include "shiftcal/kern.hpp"

using namespace shiftcal;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double plain_gaussian(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double s2) {
  double d = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) d += (a(i) - b(i)) * (a(i) - b(i));
  return std::exp(-d / (2 * s2));
}

}  // namespace

TEST_CASE("parameter kernel") {
  const auto a = vec({1, 2});
  CHECK(param_kernel_eval(a, a, 0.7) == 1.0);
  // |a-b|^2 = 2 with sigma^2 = 1
  CHECK(param_kernel_eval(vec({0, 0}), vec({1, 1}), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  double prev = 0;
  for (double s2 : {0.1, 1.0, 10.0, 100.0, 1e4, 1e8}) {
    const double k = param_kernel_eval(vec({0, 0}), vec({1, 3}), s2);
    CHECK(k > prev);
    CHECK(k <= 1.0);
    prev = k;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(ParamKernel(0.0), InvalidInput);
  CHECK_THROWS_AS(param_kernel_eval(vec({0}), vec({0, 1}), 1.0), DimensionMismatch);
}

TEST_CASE("weighted output kernel") {
  const auto y = vec({1, -2, 3});
  const ImportanceWeights b3(vec({0.5, 2, 1}));
  CHECK(weighted_output_kernel_eval(y, y, b3, 1.3) == 1.0);
  CHECK(weighted_output_kernel_eval(vec({1}), vec({0}), ImportanceWeights(vec({2})), 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(weighted_output_kernel_eval(vec({1, 2}), y, b3, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(WeightedOutputKernel(-1.0, b3), InvalidInput);
}

TEST_CASE("unit weights reduce the output kernel to a plain Gaussian") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0, 2);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + rep % 13;
    Eigen::VectorXd a(n), b(n);
    for (Eigen::Index i = 0; i < n; ++i) a(i) = nd(rng), b(i) = nd(rng);
    const double s2 = 0.5 + rep * 0.1;
    const double k = weighted_output_kernel_eval(a, b, ImportanceWeights(Eigen::VectorXd::Ones(n)), s2);
    CHECK(std::abs(k - plain_gaussian(a, b, s2)) <= 1e-15);
  }
}

TEST_CASE("kernels are symmetric, bounded and equal one only on the diagonal") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0, 1);
  std::uniform_real_distribution<double> ud(0.1, 3);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd a(5), b(5), beta(5);
    for (int i = 0; i < 5; ++i) a(i) = nd(rng), b(i) = nd(rng), beta(i) = ud(rng);
    const WeightedOutputKernel k(ud(rng), ImportanceWeights(beta));
    CHECK(k(a, b) == k(b, a));
    CHECK(k(a, b) < 1.0);
    CHECK(k(a, b) > 0.0);
    CHECK(k(a, a) == 1.0);
    const ParamKernel p(ud(rng));
    CHECK(p(a, b) == p(b, a));
    CHECK(p(a, b) < 1.0);
  }
}

TEST_CASE("median heuristic") {
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 3, 4;
  CHECK(median_heuristic(two) == 25.0);

  Eigen::MatrixXd three(3, 1);
  three << 0, 1, 3;
  // pairs: (0,1)=1, (0,3)=9, (1,3)=4 -> sorted {1,4,9}
  CHECK(median_heuristic(three) == 4.0);

  Eigen::MatrixXd four(4, 1);
  four << 0, 1, 3, 7;
  // {1, 9, 49, 4, 36, 16} sorted {1,4,9,16,36,49}: lower median 9
  CHECK(median_heuristic(four) == 9.0);

  Eigen::MatrixXd same(2, 2);
  same << 1, 2, 1, 2;
  CHECK_THROWS_AS(median_heuristic(same), DegenerateBandwidth);

  Eigen::MatrixXd w2(2, 2);
  w2 << 0, 0, 1, 1;
  CHECK(median_heuristic(w2, vec({2, 3})) == 5.0);
}

TEST_CASE("gram system") {
  Eigen::VectorXd observed = vec({1, 2});
  const ImportanceWeights beta(vec({2, 0.5}));
  const WeightedOutputKernel k(1.5, beta);

  SUBCASE("single pseudo-output") {
    Eigen::MatrixXd p(1, 2);
    p << 0, 0;
    const auto sys = gram_and_rhs(p, observed, k, 0.1);
    CHECK(sys.gram(0, 0) == 1.0);
    CHECK(sys.rhs(0) == k(p.row(0).transpose(), observed));
  }
  SUBCASE("identical pseudo-outputs give an all-ones matrix") {
    Eigen::MatrixXd p(3, 2);
    p.rowwise() = vec({4, 4}).transpose();
    CHECK(gram_and_rhs(p, observed, k, 0.1).gram == Eigen::MatrixXd::Ones(3, 3));
  }
  SUBCASE("two pseudo-outputs against hand evaluation") {
    Eigen::MatrixXd p(2, 2);
    p << 0, 0, 1, 4;
    const auto sys = gram_and_rhs(p, observed, k, 0.1);
    // (0,0) vs (1,4): 2*1 + 0.5*16 = 10
    const double g01 = std::exp(-10.0 / 3.0);
    // (0,0) vs (1,2): 2*1 + 0.5*4 = 4 ; (1,4) vs (1,2): 0.5*4 = 2
    const double r0 = std::exp(-4.0 / 3.0), r1 = std::exp(-2.0 / 3.0);
    CHECK(std::abs(sys.gram(0, 1) - g01) <= 1e-14);
    CHECK(sys.gram(1, 0) == sys.gram(0, 1));
    CHECK(sys.gram(0, 0) == 1.0);
    CHECK(sys.gram(1, 1) == 1.0);
    CHECK(std::abs(sys.rhs(0) - r0) <= 1e-14);
    CHECK(std::abs(sys.rhs(1) - r1) <= 1e-14);
  }
}

TEST_CASE("regularized solve") {
  SUBCASE("scalar") {
    GramSystem sys{Eigen::MatrixXd::Ones(1, 1), vec({0.6}), 0.25};
    CHECK(regularized_solve(sys)(0) == doctest::Approx(0.6 / 1.25).epsilon(1e-15));
  }
  SUBCASE("two by two against the closed-form inverse") {
    const double g = 0.3, a = 0.7, b = 0.2, eps = 0.05;
    Eigen::MatrixXd G(2, 2);
    G << 1, g, g, 1;
    GramSystem sys{G, vec({a, b}), eps};
    const double d = 1 + 2 * eps;  // diagonal after adding m*eps
    const double det = d * d - g * g;
    const auto w = regularized_solve(sys);
    CHECK(std::abs(w(0) - (d * a - g * b) / det) <= 1e-14);
    CHECK(std::abs(w(1) - (d * b - g * a) / det) <= 1e-14);
  }
  SUBCASE("a large regularizer shrinks the weights like rhs over m eps") {
    Eigen::MatrixXd G(2, 2);
    G << 1, 0.5, 0.5, 1;
    const auto rhs = vec({0.4, 0.9});
    for (double eps : {1e3, 1e6}) {
      const auto w = regularized_solve({G, rhs, eps});
      CHECK((w - rhs / (2 * eps)).norm() <= 2.0 * rhs.norm() / (4 * eps * eps));
    }
  }
  SUBCASE("non-finite input") {
    GramSystem sys{Eigen::MatrixXd::Ones(1, 1), vec({NAN}), 1.0};
    CHECK_THROWS_AS(regularized_solve(sys), NumericError);
    GramSystem bad_eps{Eigen::MatrixXd::Ones(1, 1), vec({1}), 0.0};
    CHECK_THROWS(regularized_solve(bad_eps));
  }
}

TEST_CASE("regularized systems factorize and solve accurately on random inputs") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index m = 5 + rep * 7, n = 4;
    Eigen::MatrixXd p(m, n);
    for (auto& v : p.reshaped()) v = nd(rng);
    Eigen::VectorXd obs(n);
    for (auto& v : obs) v = nd(rng);
    const WeightedOutputKernel k(median_heuristic(p), ImportanceWeights(Eigen::VectorXd::Constant(n, 1.3)));
    const auto sys = gram_and_rhs(p, obs, k, 0.01);
    CHECK(sys.gram == sys.gram.transpose());
    const auto w = regularized_solve(sys);
    Eigen::MatrixXd a = sys.gram;
    a.diagonal().array() += static_cast<double>(m) * 0.01;
    CHECK((a * w - sys.rhs).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, sys.rhs.lpNorm<Eigen::Infinity>()));
  }
}
