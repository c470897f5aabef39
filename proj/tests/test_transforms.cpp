#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "adaptsense/transforms.hpp"
#include "test_util.hpp"

using namespace adaptsense;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent entrywise oracle for the Haar matrix, straight from the
// definition: row 0 constant, row j = 2^p + q - 1 piecewise +-2^(p/2)/sqrt(n).
Eigen::MatrixXd haar_oracle(int n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) h(0, k) = 1.0 / std::sqrt(double(n));
  for (int j = 1; j < n; ++j) {
    const int p = int(std::floor(std::log2(double(j))));
    const int q = j - (1 << p) + 1;
    for (int k = 0; k < n; ++k) {
      const double kk = k;
      if (kk >= (q - 1.0) * n / (1 << p) && kk < (q - 0.5) * n / (1 << p)) {
        h(j, k) = std::pow(2.0, p / 2.0) / std::sqrt(double(n));
      } else if (kk >= (q - 0.5) * n / (1 << p) && kk < double(q) * n / (1 << p)) {
        h(j, k) = -std::pow(2.0, p / 2.0) / std::sqrt(double(n));
      }
    }
  }
  return h;
}

}  // namespace

TEST_CASE("dft row examples") {
  {
    DftEnsemble dft(4);
    const Eigen::VectorXcd r = dft.row(0);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(r[k] - std::complex<double>(0.5, 0.0)) < 1e-14);
    }
  }
  {
    DftEnsemble dft(2);
    const Eigen::VectorXcd r = dft.row(1);
    CHECK(std::abs(r[0] - std::complex<double>(1.0 / std::sqrt(2.0), 0.0)) < 1e-14);
    CHECK(std::abs(r[1] - std::complex<double>(-1.0 / std::sqrt(2.0), 0.0)) < 1e-14);
  }
  {
    // independent scalar evaluation of the exponential, entry by entry
    DftEnsemble dft(8);
    const Eigen::VectorXcd r = dft.row(3);
    CHECK(std::abs(r.norm() - 1.0) < 1e-12);
    for (int k = 0; k < 8; ++k) {
      const std::complex<double> direct =
          std::exp(std::complex<double>(0.0, -2.0 * kPi * 3.0 * k / 8.0)) / std::sqrt(8.0);
      CHECK(std::abs(r[k] - direct) < 1e-12);
    }
  }
}

TEST_CASE("dft row index errors") {
  DftEnsemble dft(8);
  CHECK_THROWS_AS(dft.row(-1), std::invalid_argument);
  CHECK_THROWS_AS(dft.row(8), std::invalid_argument);
  CHECK_THROWS_AS(DftEnsemble(12), std::invalid_argument);
  CHECK_THROWS_AS(DftEnsemble(0), std::invalid_argument);
}

TEST_CASE("dft unitarity and Parseval across sizes") {
  adaptsense::RandomStream rng(11);
  for (int n = 2; n <= 1024; n *= 2) {
    DftEnsemble dft(n);
    const Eigen::VectorXcd x = test_util::random_complex(n, rng);
    const Eigen::VectorXcd y = dft.forward(x);
    CHECK(test_util::rel_err(y.norm(), x.norm()) < 1e-10);
    const Eigen::VectorXcd back = dft.adjoint(y);
    CHECK((back - x).norm() < 1e-10 * x.norm());
  }
}

TEST_CASE("haar forward examples") {
  HaarBasis haar(2);
  {
    Eigen::VectorXd x(2);
    x << 1.0, 1.0;
    const Eigen::VectorXd a = haar.forward(x);
    CHECK(std::abs(a[0] - std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(a[1]) < 1e-14);
  }
  {
    Eigen::VectorXd x(2);
    x << 1.0, -1.0;
    const Eigen::VectorXd a = haar.forward(x);
    CHECK(std::abs(a[0]) < 1e-14);
    CHECK(std::abs(a[1] - std::sqrt(2.0)) < 1e-14);
  }
}

TEST_CASE("haar matches entrywise oracle") {
  adaptsense::RandomStream rng(17);
  for (int n : {2, 4, 8, 32, 128}) {
    HaarBasis haar(n);
    CHECK((haar.matrix() - haar_oracle(n)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd x = test_util::random_real(n, rng);
    const Eigen::VectorXd a = haar.forward(x);
    CHECK((a - haar_oracle(n) * x).norm() < 1e-12 * (1.0 + x.norm()));
    CHECK(test_util::rel_err(a.norm(), x.norm()) < 1e-10);
  }
}

TEST_CASE("haar unitarity round trip across sizes") {
  adaptsense::RandomStream rng(23);
  for (int n = 2; n <= 1024; n *= 2) {
    HaarBasis haar(n);
    const Eigen::VectorXd x = test_util::random_real(n, rng);
    const Eigen::VectorXd back = haar.synthesis(haar.forward(x));
    CHECK((back - x).norm() < 1e-10 * x.norm());
  }
}

TEST_CASE("haar argument errors") {
  CHECK_THROWS_AS(HaarBasis(3), std::invalid_argument);
  HaarBasis haar(8);
  Eigen::VectorXd bad(5);
  bad.setZero();
  CHECK_THROWS_AS(haar.forward(bad), std::invalid_argument);
}

TEST_CASE("synthesis columns") {
  {
    HaarBasis haar(2);
    const Eigen::MatrixXd c = haar.synthesis_columns({0});
    CHECK(std::abs(c(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(c(1, 0) - 1.0 / std::sqrt(2.0)) < 1e-14);
  }
  {
    HaarBasis haar(4);
    const Eigen::MatrixXd c = haar.synthesis_columns({0, 1, 2, 3});
    CHECK((c.transpose() * c - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-12);
  }
  {
    HaarBasis haar(8);
    const Eigen::MatrixXd c = haar.synthesis_columns({5});
    const Eigen::MatrixXd oracle = haar_oracle(8);
    CHECK((c.col(0).transpose() - oracle.row(5)).cwiseAbs().maxCoeff() < 1e-14);
  }
  HaarBasis haar(8);
  CHECK_THROWS_AS(haar.synthesis_columns({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(haar.synthesis_columns({8}), std::invalid_argument);
  CHECK_THROWS_AS(haar.synthesis_columns({}), std::invalid_argument);
}

TEST_CASE("wavelet block indexing") {
  HaarBasis haar(8);
  CHECK(haar.block_of_index(4) == 1);
  CHECK(haar.block_of_index(5) == 1);
  CHECK(haar.block_of_index(7) == 1);
  CHECK(haar.block_of_index(2) == 2);
  CHECK(haar.block_of_index(3) == 2);
  CHECK(haar.block_of_index(1) == 3);
  CHECK_THROWS_AS(haar.block_of_index(0), std::invalid_argument);
  CHECK_THROWS_AS(haar.block_of_index(8), std::invalid_argument);

  // block boundaries: n/2^a <= lambda < n/2^(a-1)
  for (int n : {16, 64, 256}) {
    HaarBasis h(n);
    for (int lam = 1; lam < n; ++lam) {
      const int a = h.block_of_index(lam);
      const int lo = n >> a;
      const int hi = n >> (a - 1);
      CHECK(lo <= lam);
      CHECK(lam < hi);
    }
  }
}

TEST_CASE("block entry magnitudes match the definition") {
  for (int n : {8, 64}) {
    HaarBasis haar(n);
    const int levels = log2_exact(n);
    for (int j = 1; j < n; ++j) {
      const int a = haar.block_of_index(j);
      const int a_prime = levels - a + 1;
      const double expected = std::pow(2.0, (a_prime - 1) / 2.0) / std::sqrt(double(n));
      for (int k = 0; k < n; ++k) {
        const double v = std::abs(haar.matrix()(j, k));
        if (v > 0.0) CHECK(std::abs(v - expected) < 1e-12);
      }
    }
  }
}

TEST_CASE("Frobenius identity for restricted plans") {
  adaptsense::RandomStream rng(29);
  const int n = 64;
  DftEnsemble dft(n);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + rng.uniform_index(2 * n);
    const int s = 1 + rng.uniform_index(12);
    std::vector<int> support;
    while (int(support.size()) < s) {
      const int idx = rng.uniform_index(n);
      bool dup = false;
      for (int t : support) dup |= (t == idx);
      if (!dup) support.push_back(idx);
    }
    double frob = 0.0;
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXcd row = dft.row(rng.uniform_index(n));
      for (int t : support) frob += std::norm(row[t]);
    }
    CHECK(std::abs(frob - double(s) * m / n) < 1e-10 * std::max(1.0, double(s) * m / n));
  }
}

TEST_CASE("fourier synthesis product matches direct row-column products") {
  const int n = 16;
  DftEnsemble dft(n);
  HaarBasis haar(n);
  const Eigen::MatrixXcd g = fourier_synthesis_product(dft, haar);
  const Eigen::MatrixXd oracle = haar_oracle(n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXcd row = dft.row(j);
    for (int lam = 0; lam < n; ++lam) {
      std::complex<double> direct = 0.0;
      for (int k = 0; k < n; ++k) direct += row[k] * oracle(lam, k);
      CHECK(std::abs(g(j, lam) - direct) < 1e-12);
    }
  }
}
