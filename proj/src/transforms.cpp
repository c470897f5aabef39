#include "adaptsense/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace adaptsense {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int p = 0;
  while ((1 << p) < n) ++p;
  return p;
}

DftEnsemble::DftEnsemble(int n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("DftEnsemble: n must be a positive power of two");
  }
  roots_.resize(n);
  for (int t = 0; t < n; ++t) {
    const double angle = -2.0 * kPi * static_cast<double>(t) / n;
    roots_[t] = std::complex<double>(std::cos(angle), std::sin(angle));
  }
}

std::complex<double> DftEnsemble::entry(int j, int k) const {
  // j*k fits in 64 bits for any practical n; reduce mod n to keep the phase exact
  const std::int64_t t = (static_cast<std::int64_t>(j) * k) % n_;
  return roots_[static_cast<int>(t)] / std::sqrt(static_cast<double>(n_));
}

Eigen::VectorXcd DftEnsemble::row(int j) const {
  if (j < 0 || j >= n_) {
    throw std::invalid_argument("DftEnsemble::row: index out of range");
  }
  Eigen::VectorXcd r(n_);
  for (int k = 0; k < n_; ++k) r[k] = entry(j, k);
  return r;
}

Eigen::VectorXcd DftEnsemble::forward(const Eigen::VectorXcd& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("DftEnsemble::forward: dimension mismatch");
  }
  Eigen::VectorXcd y(n_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (int j = 0; j < n_; ++j) {
    std::complex<double> acc = 0.0;
    std::int64_t t = 0;
    for (int k = 0; k < n_; ++k) {
      acc += roots_[static_cast<int>(t)] * x[k];
      t += j;
      if (t >= n_) t -= n_;
    }
    y[j] = acc * scale;
  }
  return y;
}

Eigen::VectorXcd DftEnsemble::adjoint(const Eigen::VectorXcd& y) const {
  if (y.size() != n_) {
    throw std::invalid_argument("DftEnsemble::adjoint: dimension mismatch");
  }
  Eigen::VectorXcd x(n_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (int k = 0; k < n_; ++k) {
    std::complex<double> acc = 0.0;
    std::int64_t t = 0;
    for (int j = 0; j < n_; ++j) {
      acc += std::conj(roots_[static_cast<int>(t)]) * y[j];
      t += k;
      if (t >= n_) t -= n_;
    }
    x[k] = acc * scale;
  }
  return x;
}

HaarBasis::HaarBasis(int n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("HaarBasis: n must be a positive power of two");
  }
  levels_ = log2_exact(n);
  h_ = Eigen::MatrixXd::Zero(n, n);
  const double root_n = std::sqrt(static_cast<double>(n));
  h_.row(0).setConstant(1.0 / root_n);
  for (int j = 1; j < n; ++j) {
    int p = 0;
    while ((1 << (p + 1)) <= j) ++p;
    const int q = j - (1 << p) + 1;
    const int width = n >> p;  // support length of row j
    const int lo = (q - 1) * width;
    const int mid = lo + width / 2;
    const int hi = lo + width;
    const double val = std::sqrt(static_cast<double>(1 << p)) / root_n;
    for (int k = lo; k < mid; ++k) h_(j, k) = val;
    for (int k = mid; k < hi; ++k) h_(j, k) = -val;
  }
}

Eigen::VectorXd HaarBasis::forward(const Eigen::VectorXd& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("HaarBasis::forward: length must equal n");
  }
  return h_ * x;
}

Eigen::VectorXd HaarBasis::synthesis(const Eigen::VectorXd& alpha) const {
  if (alpha.size() != n_) {
    throw std::invalid_argument("HaarBasis::synthesis: length must equal n");
  }
  return h_.transpose() * alpha;
}

Eigen::VectorXcd HaarBasis::synthesis(const Eigen::VectorXcd& alpha) const {
  if (alpha.size() != n_) {
    throw std::invalid_argument("HaarBasis::synthesis: length must equal n");
  }
  return h_.transpose() * alpha;
}

Eigen::MatrixXd HaarBasis::synthesis_columns(const std::vector<int>& support) const {
  if (support.empty()) {
    throw std::invalid_argument("HaarBasis::synthesis_columns: empty index set");
  }
  std::vector<bool> seen(n_, false);
  for (int idx : support) {
    if (idx < 0 || idx >= n_) {
      throw std::invalid_argument("HaarBasis::synthesis_columns: index out of range");
    }
    if (seen[idx]) {
      throw std::invalid_argument("HaarBasis::synthesis_columns: duplicate index");
    }
    seen[idx] = true;
  }
  Eigen::MatrixXd cols(n_, static_cast<int>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    cols.col(static_cast<int>(c)) = h_.row(support[c]).transpose();
  }
  return cols;
}

int HaarBasis::block_of_index(int lambda) const {
  if (lambda == 0) {
    throw std::invalid_argument("HaarBasis::block_of_index: scaling index has no wavelet block");
  }
  if (lambda < 0 || lambda >= n_) {
    throw std::invalid_argument("HaarBasis::block_of_index: index out of range");
  }
  int p = 0;
  while ((1 << (p + 1)) <= lambda) ++p;
  return levels_ - p;
}

Eigen::MatrixXcd fourier_synthesis_product(const DftEnsemble& dft,
                                           const HaarBasis& haar) {
  const int n = dft.size();
  if (haar.size() != n) {
    throw std::invalid_argument("fourier_synthesis_product: dimension mismatch");
  }
  const Eigen::MatrixXd& h = haar.matrix();
  Eigen::MatrixXcd g(n, n);
  // Column k of H^* is row k of H, nonzero on a contiguous range; sum only there.
  for (int lam = 0; lam < n; ++lam) {
    int lo = 0, hi = n;
    if (lam > 0) {
      int p = 0;
      while ((1 << (p + 1)) <= lam) ++p;
      const int q = lam - (1 << p) + 1;
      const int width = n >> p;
      lo = (q - 1) * width;
      hi = lo + width;
    }
    for (int j = 0; j < n; ++j) {
      std::complex<double> acc = 0.0;
      for (int k = lo; k < hi; ++k) acc += dft.entry(j, k) * h(lam, k);
      g(j, lam) = acc;
    }
  }
  return g;
}

}  // namespace adaptsense
