#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <set>

#include "adaptsense/analysis.hpp"
#include "adaptsense/design.hpp"
#include "test_util.hpp"

using namespace adaptsense;

namespace {

constexpr double kPi = 3.14159265358979323846;

// direct summation oracle for the partial geometric sums
double direct_sum_magnitude(int n, int j, int a, int k) {
  std::complex<double> acc = 0.0;
  const int len = (1 << a) / 2;
  for (int q = k; q < k + len; ++q) {
    acc += std::exp(std::complex<double>(0.0, -2.0 * kPi * j * q / n));
  }
  return std::abs(acc);
}

}  // namespace

TEST_CASE("geometric sum closed form vs direct summation") {
  // the two-term sum with j = n/2 cancels exactly
  CHECK(geometric_sum_magnitude(8, 4, 2, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(direct_sum_magnitude(8, 4, 2, 0) == doctest::Approx(0.0).epsilon(1e-12));

  // closed form agrees with the direct sum for every admissible (j, a, k)
  for (int n : {8, 16}) {
    const int levels = log2_exact(n);
    for (int j = 1; j < n; ++j) {
      for (int a = 1; a <= levels; ++a) {
        const int len = (1 << a) / 2;
        for (int k = 0; k + len <= n; ++k) {
          CHECK(std::abs(geometric_sum_magnitude(n, j, a, k) -
                         direct_sum_magnitude(n, j, a, k)) < 1e-12);
        }
      }
    }
  }

  // independence of the offset
  for (int k = 0; k < 6; ++k) {
    CHECK(std::abs(geometric_sum_magnitude(8, 1, 1, k) -
                   geometric_sum_magnitude(8, 1, 1, k + 1)) < 1e-12);
  }

  CHECK_THROWS_AS(geometric_sum_magnitude(8, 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(geometric_sum_magnitude(8, 8, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(geometric_sum_magnitude(8, 1, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(geometric_sum_magnitude(8, 1, 2, 7), std::invalid_argument);
}

TEST_CASE("coherence special cases") {
  CHECK(coherence_closed_form(16, 0, 0) == 1.0);
  CHECK(coherence_closed_form(16, 3, 0) == 0.0);
  CHECK(coherence_closed_form(16, 0, 7) == 0.0);
}

TEST_CASE("closed form equals brute force across sizes") {
  for (int n = 2; n <= 64; n *= 2) {
    const DftEnsemble dft(n);
    const HaarBasis haar(n);
    const CoherenceTable brute = CoherenceTable::brute_force(dft, haar);
    const CoherenceTable closed = CoherenceTable::closed_form(n);
    CHECK((brute.values - closed.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(closed.values.minCoeff() >= 0.0);
    CHECK(closed.values.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("min-max and max-max coherence") {
  {
    const auto [mn, mx] = minmax_bounds(64);
    CHECK(std::abs(mn - std::sqrt(2.0 / 64.0)) < 1e-12);
    CHECK(std::abs(mx - 1.0) < 1e-15);
  }
  {
    const auto [mn, mx] = minmax_bounds(2);
    CHECK(std::abs(mn - 1.0) < 1e-12);
    CHECK(std::abs(mx - 1.0) < 1e-15);
  }
  for (int n = 2; n <= 256; n *= 2) {
    const auto [mn, mx] = minmax_bounds(n);
    CHECK(std::abs(mn - std::sqrt(2.0 / n)) < 1e-12);
    CHECK(std::abs(mx - 1.0) < 1e-15);
  }
}

TEST_CASE("block-restricted maxima") {
  const int n = 64;
  const int levels = log2_exact(n);
  CHECK(block_restricted_max(n, {}) == doctest::Approx(1.0).epsilon(1e-12));

  std::set<int> all_but_one;
  for (int a = 2; a <= levels; ++a) all_but_one.insert(a);
  CHECK(block_restricted_max(n, all_but_one) ==
        doctest::Approx(std::sqrt(2.0 / n)).epsilon(1e-10));

  // removing more blocks never increases the value
  std::set<int> excluded;
  double prev = block_restricted_max(n, excluded);
  for (int a = levels; a >= 2; --a) {
    excluded.insert(a);
    const double cur = block_restricted_max(n, excluded);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }

  std::set<int> everything;
  for (int a = 1; a <= levels; ++a) everything.insert(a);
  CHECK_THROWS_AS(block_restricted_max(n, everything), std::invalid_argument);
  CHECK_THROWS_AS(block_restricted_max(n, std::set<int>{levels + 1}), std::invalid_argument);
}

TEST_CASE("block curve is monotone and ends at sqrt(2/n)") {
  for (int n : {16, 64, 256}) {
    const auto curve = block_restricted_curve(n);
    CHECK(curve.front().removed_blocks == 0);
    CHECK(curve.front().value == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < curve.size(); ++k) {
      CHECK(curve[k].value <= curve[k - 1].value + 1e-12);
    }
    CHECK(curve.back().value == doctest::Approx(std::sqrt(2.0 / n)).epsilon(1e-10));
  }
}

TEST_CASE("one-sparse MSE values and bounds") {
  const int n = 64, m = 32;
  const double sigma2 = 1e-4;
  CHECK(one_sparse_mse(n, m, 0, 0, sigma2) == doctest::Approx(sigma2 / m).epsilon(1e-12));

  const int lam = n / 2;  // block a = 1
  const int j = best_row_for_support(n, lam);
  CHECK(one_sparse_mse(n, m, j, lam, sigma2) ==
        doctest::Approx((n / 2.0) * sigma2 / m).epsilon(1e-10));
  CHECK(one_sparse_mse_adaptive(n, m, j, lam, sigma2) ==
        doctest::Approx(n * sigma2 / m).epsilon(1e-10));

  // zero-coherence pairs are rejected
  CHECK_THROWS_AS(one_sparse_mse(n, 2, 1, 0, sigma2), std::invalid_argument);

  // sandwich: the best row for every support sits inside the oracle bounds
  for (int lambda = 0; lambda < n; ++lambda) {
    const int best = best_row_for_support(n, lambda);
    const double mse = one_sparse_mse(n, m, best, lambda, sigma2);
    CHECK(mse >= sigma2 / m - 1e-18);
    CHECK(mse <= n * sigma2 / (2.0 * m) + 1e-18);
  }
}

TEST_CASE("canonical-basis plans meet the Frobenius lower bound exactly") {
  // with the canonical sparsity basis, every m-row DFT plan restricted to a
  // 1-sparse support has squared singular value m/n
  const int n = 32, m = 9;
  const double sigma2 = 1e-3;
  const DftEnsemble dft(n);
  RandomStream rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int lam = rng.uniform_index(n);
    Eigen::MatrixXcd restricted(m, 1);
    for (int i = 0; i < m; ++i) restricted(i, 0) = dft.entry(rng.uniform_index(n), lam);
    CHECK(test_util::rel_err(oracle_mse(restricted, sigma2), double(n) / m * sigma2) < 1e-10);
  }
}

TEST_CASE("ridge risk closed form") {
  RandomStream rng(57);
  Eigen::MatrixXd b(20, 5);
  for (int i = 0; i < 20; ++i) {
    for (int k = 0; k < 5; ++k) b(i, k) = rng.gaussian();
  }
  const double sigma2 = 0.25;

  // rho^2 -> infinity recovers the pseudoinverse Frobenius norm
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  double pinv = 0.0;
  for (int i = 0; i < 5; ++i) {
    pinv += 1.0 / (svd.singularValues()[i] * svd.singularValues()[i]);
  }
  CHECK(test_util::rel_err(bayes_risk_closed_form(b, sigma2, 1e12), sigma2 * pinv) < 1e-6);

  // orthonormal columns scaled by c with s = 1
  Eigen::MatrixXd col(4, 1);
  col << 0.5, 0.5, 0.5, 0.5;  // unit column
  const double c = 3.0;
  const double rho2 = 2.0;
  const double shift = sigma2 / rho2;
  const double expected = sigma2 * std::pow(c / (c * c + shift), 2);
  CHECK(test_util::rel_err(bayes_risk_closed_form(c * col, sigma2, rho2), expected) < 1e-12);

  CHECK_THROWS_AS(bayes_risk_closed_form(b, sigma2, 0.0), std::invalid_argument);
}

TEST_CASE("ridge risk matches a noise-only Monte Carlo") {
  RandomStream rng(61);
  Eigen::MatrixXd b(20, 5);
  for (int i = 0; i < 20; ++i) {
    for (int k = 0; k < 5; ++k) b(i, k) = rng.gaussian();
  }
  const double sigma2 = 0.25, rho2 = 1.0;
  const double formula = bayes_risk_closed_form(b, sigma2, rho2);
  const Eigen::MatrixXd gram =
      b.transpose() * b + (sigma2 / rho2) * Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd estimator = gram.llt().solve(b.transpose());
  double acc = 0.0;
  const int draws = 20000;
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXd z(20);
    for (int i = 0; i < 20; ++i) z[i] = std::sqrt(sigma2) * rng.gaussian();
    acc += (estimator * z).squaredNorm();
  }
  CHECK(std::abs(acc / draws - formula) <= 0.03 * formula);
}
