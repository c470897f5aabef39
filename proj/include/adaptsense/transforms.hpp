// Exact dense DFT and Haar wavelet operators.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace adaptsense {

bool is_power_of_two(int n);
int log2_exact(int n);  // n must be a power of two

// Unitary DFT with entries exp(-2*pi*i*j*k/n)/sqrt(n). The matrix is kept
// implicit; rows and products are evaluated from a table of the n-th roots
// of unity so entries are exact up to one libm call.
class DftEnsemble {
 public:
  explicit DftEnsemble(int n);

  int size() const { return n_; }
  std::complex<double> entry(int j, int k) const;
  Eigen::VectorXcd row(int j) const;
  Eigen::VectorXcd forward(const Eigen::VectorXcd& x) const;  // F x
  Eigen::VectorXcd adjoint(const Eigen::VectorXcd& y) const;  // F^H y

 private:
  int n_;
  Eigen::VectorXcd roots_;  // roots_[t] = exp(-2*pi*i*t/n)
};

// Orthonormal Haar transform H. Row 0 is the constant scaling row; row
// j = 2^p + q - 1 is the (p, q) wavelet. Wavelet rows are grouped into
// blocks a = 1..log2(n) of equal entry magnitude, block a holding indices
// n/2^a .. n/2^(a-1)-1 (a = 1 is the bottom half, the highest frequencies).
class HaarBasis {
 public:
  explicit HaarBasis(int n);

  int size() const { return n_; }
  int levels() const { return levels_; }
  const Eigen::MatrixXd& matrix() const { return h_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;          // H x
  Eigen::VectorXd synthesis(const Eigen::VectorXd& alpha) const;    // H^T alpha
  Eigen::VectorXcd synthesis(const Eigen::VectorXcd& alpha) const;  // H^T alpha

  // Columns of H^* at the given (distinct, in-range) indices.
  Eigen::MatrixXd synthesis_columns(const std::vector<int>& support) const;

  // Wavelet block of index lambda >= 1; lambda = 0 is the scaling index and
  // belongs to no block (throws).
  int block_of_index(int lambda) const;

 private:
  int n_;
  int levels_;
  Eigen::MatrixXd h_;
};

// Effective operator of a full-ensemble acquisition: row j, column k holds
// the bilinear product of DFT row j with column k of H^*. Rows of this
// matrix are the rows of A' Psi for any measurement plan.
Eigen::MatrixXcd fourier_synthesis_product(const DftEnsemble& dft,
                                           const HaarBasis& haar);

}  // namespace adaptsense
