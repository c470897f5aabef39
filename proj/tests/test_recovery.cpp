#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "adaptsense/recovery.hpp"
#include "adaptsense/transforms.hpp"
#include "test_util.hpp"

using namespace adaptsense;

namespace {

// plants an s-sparse real coefficient vector with unit-scale entries
Eigen::VectorXcd plant_sparse(int n, const std::vector<int>& support,
                              RandomStream& rng) {
  Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(n);
  for (int idx : support) {
    double v = rng.gaussian();
    if (std::abs(v) < 0.3) v = (v < 0 ? -0.3 : 0.3);  // keep entries visible
    alpha[idx] = std::complex<double>(3.0 * v, 0.0);
  }
  return alpha;
}

std::vector<int> random_support(int n, int s, RandomStream& rng) {
  std::vector<int> sup;
  while (int(sup.size()) < s) {
    const int idx = rng.uniform_index(n);
    bool dup = false;
    for (int t : sup) dup |= (t == idx);
    if (!dup) sup.push_back(idx);
  }
  std::sort(sup.begin(), sup.end());
  return sup;
}

}  // namespace

TEST_CASE("cosamp trivial cases") {
  const int n = 32;
  RandomStream rng(3);
  {
    RecoveryProblem p{Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXcd::Zero(n), 3, 0.0};
    const CosampResult r = cosamp(p);
    CHECK(r.coeffs.norm() == 0.0);
    CHECK(r.support.empty());
  }
  {
    // orthonormal columns: the first proxy equals the signal
    const std::vector<int> sup = {2, 9, 20};
    const Eigen::VectorXcd alpha = plant_sparse(n, sup, rng);
    RecoveryProblem p{Eigen::MatrixXcd::Identity(n, n), alpha, 3, 0.0};
    const CosampResult r = cosamp(p);
    CHECK(r.support == sup);
    CHECK((r.coeffs - alpha).norm() < 1e-10 * alpha.norm());
    CHECK(r.iterations <= 2);
  }
  RecoveryProblem bad{Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXcd::Zero(n), 0, 0.0};
  CHECK_THROWS_AS(cosamp(bad), std::invalid_argument);
}

TEST_CASE("cosamp output is always s-sparse") {
  RandomStream rng(5);
  const int n = 64, m = 24, s = 5;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd phi = test_util::random_gaussian_matrix(m, n, rng);
    const Eigen::VectorXcd y = test_util::random_complex(m, rng);  // arbitrary data
    const CosampResult r = cosamp({phi, y, s, 0.0});
    CHECK(int(r.support.size()) <= s);
    int nnz = 0;
    for (int i = 0; i < n; ++i) {
      if (r.coeffs[i] != std::complex<double>(0.0, 0.0)) ++nnz;
    }
    CHECK(nnz <= s);
  }
}

TEST_CASE("cosamp noiseless Gaussian recovery rate") {
  const int n = 256, s = 5;
  const int m = 6 * s * log2_exact(n);  // 240
  RandomStream rng(91);
  int successes = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd phi = test_util::random_gaussian_matrix(m, n, rng);
    const std::vector<int> sup = random_support(n, s, rng);
    const Eigen::VectorXcd alpha = plant_sparse(n, sup, rng);
    const Eigen::VectorXcd y = phi * alpha;
    const CosampResult r = cosamp({phi, y, s, 0.0});
    if ((r.coeffs - alpha).norm() <= 1e-6 * alpha.norm()) ++successes;
  }
  CHECK(successes >= 190);  // >= 95%
}

TEST_CASE("bpdn trivial cases") {
  const int n = 16;
  {
    RecoveryProblem p{Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXcd::Zero(n), 1, 0.0};
    const BpdnResult r = bpdn(p, 0.0);
    CHECK(r.coeffs.norm() == 0.0);
    CHECK(r.converged);
  }
  {
    // 1-sparse with orthonormal columns
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(n);
    alpha[4] = std::complex<double>(2.5, 0.0);
    RecoveryProblem p{Eigen::MatrixXcd::Identity(n, n), alpha, 1, 0.0};
    const BpdnResult r = bpdn(p, 0.0);
    CHECK((r.coeffs - alpha).norm() < 1e-8 * alpha.norm());
  }
  CHECK_THROWS_AS(bpdn({Eigen::MatrixXcd::Identity(4, 4), Eigen::VectorXcd::Zero(4), 1, 0.0}, -1.0),
                  std::invalid_argument);
}

TEST_CASE("bpdn noiseless Gaussian recovery rate") {
  const int n = 256, s = 5;
  const int m = 6 * s * log2_exact(n);
  RandomStream rng(101);
  int successes = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd phi = test_util::random_gaussian_matrix(m, n, rng);
    const std::vector<int> sup = random_support(n, s, rng);
    const Eigen::VectorXcd alpha = plant_sparse(n, sup, rng);
    const Eigen::VectorXcd y = phi * alpha;
    const BpdnResult r = bpdn({phi, y, s, 0.0}, 0.0);
    if ((r.coeffs - alpha).norm() <= 1e-4 * alpha.norm()) ++successes;
  }
  CHECK(successes >= 190);
}

TEST_CASE("bpdn feasibility at positive epsilon") {
  RandomStream rng(111);
  const int n = 64, m = 40, s = 4;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXcd phi = test_util::random_gaussian_matrix(m, n, rng);
    const std::vector<int> sup = random_support(n, s, rng);
    const Eigen::VectorXcd alpha = plant_sparse(n, sup, rng);
    Eigen::VectorXcd y = phi * alpha;
    for (int i = 0; i < m; ++i) y[i] += rng.complex_gaussian(1e-4);
    const double eps = bpdn_epsilon(1e-4, m);
    const BpdnResult r = bpdn({phi, y, s, 1e-4}, eps);
    CHECK((phi * r.coeffs - y).norm() <= eps * (1.0 + 1e-6));
  }
}

TEST_CASE("top-s thresholding") {
  Eigen::VectorXcd v(3);
  v << 3.0, 1.0, 2.0;
  CHECK(top_s_threshold(v, 2) == std::vector<int>{0, 2});

  Eigen::VectorXcd ties(4);
  ties << 1.0, 1.0, 1.0, 1.0;
  CHECK(top_s_threshold(ties, 2) == std::vector<int>{0, 1});

  Eigen::VectorXcd sparse = Eigen::VectorXcd::Zero(8);
  sparse[1] = 2.0;
  sparse[6] = -1.0;
  CHECK(top_s_threshold(sparse, 2) == std::vector<int>{1, 6});
  CHECK_THROWS_AS(top_s_threshold(sparse, 0), std::invalid_argument);
}

TEST_CASE("least squares on a fixed support") {
  RandomStream rng(121);
  const int m = 16, s = 3;
  const Eigen::MatrixXcd phi = test_util::random_gaussian_matrix(m, s, rng);
  const Eigen::VectorXcd alpha = test_util::random_complex(s, rng);

  // noiseless: exact
  const Eigen::VectorXcd got = ls_on_support(phi * alpha, phi);
  CHECK((got - alpha).norm() < 1e-10 * alpha.norm());

  // residual orthogonal to the column span
  Eigen::VectorXcd y = phi * alpha;
  for (int i = 0; i < m; ++i) y[i] += rng.complex_gaussian(0.01);
  const Eigen::VectorXcd fit = ls_on_support(y, phi);
  const Eigen::VectorXcd resid = y - phi * fit;
  CHECK((phi.adjoint() * resid).norm() < 1e-8 * (1.0 + y.norm()));

  // rank-deficient: both columns equal
  Eigen::MatrixXcd rank1(m, 2);
  rank1.col(0) = phi.col(0);
  rank1.col(1) = phi.col(0);
  CHECK_THROWS_AS(ls_on_support(y, rank1), IdentifiabilityError);
}

TEST_CASE("repeated-row pseudoinverse is the scaled mean") {
  // m identical rows c: the pseudoinverse estimate is mean(y) / c
  const int m = 7;
  const std::complex<double> c(0.3, -0.4);
  Eigen::MatrixXcd phi(m, 1);
  phi.setConstant(c);
  RandomStream rng(131);
  const Eigen::VectorXcd y = test_util::random_complex(m, rng);
  const Eigen::VectorXcd got = ls_on_support(y, phi);
  const std::complex<double> expected = (y.sum() / double(m)) / c;
  CHECK(std::abs(got[0] - expected) < 1e-12);
}

TEST_CASE("Monte Carlo MSE matches the pseudoinverse Frobenius law") {
  RandomStream rng(141);
  const int m = 16, s = 3;
  const double sigma2 = 1e-2;
  const Eigen::MatrixXcd phi = test_util::random_gaussian_matrix(m, s, rng);
  const Eigen::VectorXcd alpha = test_util::random_complex(s, rng);
  const Eigen::VectorXcd clean = phi * alpha;

  // expected: || phi^+ ||_F^2 sigma^2 via singular values
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(phi);
  double pinv_frob = 0.0;
  for (int i = 0; i < s; ++i) {
    pinv_frob += 1.0 / (svd.singularValues()[i] * svd.singularValues()[i]);
  }
  const double expected = pinv_frob * sigma2;

  double acc = 0.0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXcd y = clean;
    for (int i = 0; i < m; ++i) y[i] += rng.complex_gaussian(sigma2);
    acc += (ls_on_support(y, phi) - alpha).squaredNorm();
  }
  const double mc = acc / draws;
  CHECK(std::abs(mc - expected) <= 0.05 * expected);
}
