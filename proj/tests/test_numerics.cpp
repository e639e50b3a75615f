#include "dte/numerics.hpp"

#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace dte;
using namespace dte::numerics;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::MatrixXd random_matrix(int n, int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST_CASE("kernel_eval basics") {
  CHECK(kernel_eval(KernelSpec::rbf(1.0), vec1(3.7), vec1(3.7)) == 1.0);
  CHECK(kernel_eval(KernelSpec::rbf(0.5), vec1(0.0), vec1(1.0)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  Eigen::VectorXd u(2), v(2);
  u << 1, 2;
  v << 3, -1;
  CHECK(kernel_eval(KernelSpec::linear(), u, v) == 1.0);
  CHECK_THROWS_AS(kernel_eval(KernelSpec::rbf(1.0), u, vec1(0.0)), InputError);
  CHECK_THROWS_AS(kernel_eval(KernelSpec::rbf(0.0), vec1(0), vec1(1)),
                  InputError);
}

TEST_CASE("gram matches entrywise evaluation") {
  Eigen::MatrixXd two(2, 1);
  two << 0, 0;
  const auto g0 = gram(KernelSpec::rbf(1.0), two, two);
  CHECK(g0.values.isApprox(Eigen::MatrixXd::Ones(2, 2)));

  Eigen::MatrixXd rows(1, 2), cols(2, 2);
  rows << 1, 0;
  cols << 0, 1, 2, 0;
  const auto gl = gram(KernelSpec::linear(), rows, cols);
  CHECK(gl.values(0, 0) == 0.0);
  CHECK(gl.values(0, 1) == 2.0);

  const auto pts = random_matrix(5, 3, 11);
  const auto spec = KernelSpec::rbf(1.0);
  const auto g = gram(spec, pts, pts);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(g.values(i, j) ==
            doctest::Approx(kernel_eval(spec, pts.row(i), pts.row(j)))
                .epsilon(1e-12));

  Eigen::MatrixXd a(2, 2), b(2, 3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(gram(spec, a, b), InputError);
}

TEST_CASE("symmetric gram is bit-symmetric with unit diagonal and PSD") {
  const auto pts = random_matrix(24, 4, 7);
  const auto g = gram(KernelSpec::rbf(2.0), pts);
  for (int i = 0; i < 24; ++i) {
    CHECK(g.values(i, i) == 1.0);
    for (int j = 0; j < 24; ++j) CHECK(g.values(i, j) == g.values(j, i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.values);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * 24);
}

TEST_CASE("median_heuristic enumerated examples") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0, 1, 2;  // squared distances {1, 4, 1}
  CHECK(median_heuristic(pts) == 1.0);

  Eigen::MatrixXd same(3, 1);
  same << 0, 0, 0;
  CHECK_THROWS_AS(median_heuristic(same), DegenerateBandwidthError);

  Eigen::MatrixXd one(1, 1);
  one << 0;
  CHECK_THROWS_AS(median_heuristic(one), InputError);
}

TEST_CASE("median_heuristic matches the enumeration oracle exactly") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto pts = random_matrix(50, 3, seed);
    CHECK(median_heuristic(pts) == oracles::median_heuristic_oracle(pts));
  }
  // Even pair count: n = 4 gives 6 pairs.
  const auto pts4 = random_matrix(4, 2, 9);
  CHECK(median_heuristic(pts4) == oracles::median_heuristic_oracle(pts4));
}

TEST_CASE("median_heuristic translation invariance and quadratic scaling") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pts = random_matrix(20, 2, 100 + trial);
    const double base = median_heuristic(pts);
    Eigen::MatrixXd shifted = pts;
    const double t = g(rng);
    shifted.array() += t;
    CHECK(median_heuristic(shifted) == doctest::Approx(base).epsilon(1e-9));
    const double c = 0.5 + std::abs(g(rng));
    CHECK(median_heuristic(Eigen::MatrixXd(c * pts)) ==
          doctest::Approx(c * c * base).epsilon(1e-9));
  }
}

TEST_CASE("reg_solve closed forms") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(reg_solve(zero, 0.5, eye2).isApprox(2.0 * eye2, 1e-12));

  const Eigen::MatrixXd eye3 = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd ones3 = Eigen::VectorXd::Ones(3);
  CHECK(reg_solve(eye3, 1.0, ones3).isApprox(0.5 * ones3, 1e-12));
}

TEST_CASE("reg_solve matches a dense-inverse oracle and residual bound") {
  for (int n : {10, 60}) {
    const auto b = random_matrix(n, n, 40 + static_cast<unsigned>(n));
    const Eigen::MatrixXd K = b * b.transpose();  // PSD
    const auto rhs = random_matrix(n, 2, 41 + static_cast<unsigned>(n));
    const double lambda = 0.1;
    const auto out = reg_solve(K, lambda, rhs);

    Eigen::MatrixXd system = K;
    system.diagonal().array() += lambda;
    const Eigen::MatrixXd oracle = system.inverse() * rhs;
    CHECK((out - oracle).norm() <= 1e-8 * oracle.norm());
    CHECK((system * out - rhs).norm() <= 1e-8 * rhs.norm());
  }
}

TEST_CASE("reg_solve rejects bad input") {
  const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(reg_solve(eye2, 0.0, eye2), InputError);
  CHECK_THROWS_AS(reg_solve(Eigen::MatrixXd::Zero(2, 3), 1.0, eye2),
                  InputError);
}

TEST_CASE("std_normal_cdf reference points") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(std_normal_cdf(-8.0) < 1e-15);
  CHECK(std_normal_cdf(-8.0) > 0.0);
  // Tail bound: phi(8)/8 * (1 - 1/64) < Phi(-8) < phi(8)/8.
  const double phi8 = std::exp(-32.0) / std::sqrt(2.0 * M_PI);
  CHECK(std_normal_cdf(-8.0) < phi8 / 8.0);
  CHECK(std_normal_cdf(-8.0) > phi8 / 8.0 * (1.0 - 1.0 / 64.0));
}

TEST_CASE("std_normal_cdf against the quadrature oracle") {
  for (double t = -6.0; t <= 6.0; t += 0.37) {
    const double expected =
        static_cast<double>(oracles::std_normal_cdf_oracle(t));
    CHECK(std::abs(std_normal_cdf(t) - expected) <= 1e-9);
  }
}

TEST_CASE("std_normal_cdf monotone and symmetric") {
  double prev = -1.0;
  for (double t = -6.0; t <= 6.0; t += 0.01) {
    const double v = std_normal_cdf(t);
    CHECK(v >= prev);
    prev = v;
    CHECK(std::abs(v + std_normal_cdf(-t) - 1.0) <= 1e-12);
  }
}
