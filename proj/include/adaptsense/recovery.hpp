// Sparse recovery: CoSaMP, basis-pursuit denoising, thresholding, and
// least squares on a fixed support.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adaptsense/errors.hpp"

namespace adaptsense {

// y = Phi * alpha + z with Phi the effective sensing operator (A' Psi).
struct RecoveryProblem {
  Eigen::MatrixXcd phi;
  Eigen::VectorXcd y;
  int sparsity = 0;
  double sigma2 = 0.0;
};

struct CosampResult {
  Eigen::VectorXcd coeffs;   // length n, at most s nonzeros
  std::vector<int> support;  // supp(coeffs), sorted
  int iterations = 0;
};

// Standard CoSaMP iteration: proxy = Phi^H r, merge the 2s largest proxy
// indices with the current support, least squares on the merged support,
// prune to s, update the residual. Stops at max_iters or when the residual
// norm stops decreasing by more than 1e-8 relative.
CosampResult cosamp(const RecoveryProblem& problem, int max_iters = 50);

struct BpdnResult {
  Eigen::VectorXcd coeffs;
  bool converged = true;  // false when the solver hit its iteration budget
  int iterations = 0;
};

// min ||a||_1  subject to  ||Phi a - y||_2 <= epsilon.
// Solved through the penalized form with FISTA and an outer search on the
// penalty weight; the output is feasible but not necessarily exactly sparse.
BpdnResult bpdn(const RecoveryProblem& problem, double epsilon,
                int max_iters = 1500);

// Residual bound used when only the noise level is known.
double bpdn_epsilon(double sigma2, int m);

// Indices of the s largest-magnitude entries, ties broken by lowest index.
std::vector<int> top_s_threshold(const Eigen::VectorXcd& coeffs, int s);

// Minimum-norm least-squares solution (Moore-Penrose) for a full-column-rank
// operator; throws IdentifiabilityError when the columns are dependent.
Eigen::VectorXcd ls_on_support(const Eigen::VectorXcd& y,
                               const Eigen::MatrixXcd& phi_support);

}  // namespace adaptsense
