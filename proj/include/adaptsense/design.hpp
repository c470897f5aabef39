// A-optimal continuous design over ensemble rows: weighted trace-inverse
// objective, projected-gradient solver, and the with-replacement sampler
// that turns weights into a concrete measurement plan.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adaptsense/errors.hpp"
#include "adaptsense/rng.hpp"

namespace adaptsense {

// Nonnegative weights over the |M| ensemble rows, trace bounded by the
// measurement budget m.
struct DesignWeights {
  Eigen::VectorXd w;
  int budget = 0;
};

// Length-m row sequence (repeats allowed) drawn from the ensemble.
struct MeasurementPlan {
  std::vector<int> rows;
};

// trace(((B^H diag(w) B)^-1) for the restricted operator B = A Psi_Lambda.
// Returns +inf when the weighted Gram is singular so searches can reject.
double design_objective(const Eigen::VectorXd& w, const Eigen::MatrixXcd& b);

// d/dw_i of the objective: -|| M^-1 b_i ||^2 with M the weighted Gram and
// b_i the i-th row of B.
Eigen::VectorXd design_gradient(const Eigen::VectorXd& w, const Eigen::MatrixXcd& b);

// Euclidean projection onto { x >= 0, sum(x) <= radius }.
Eigen::VectorXd project_weight_budget(const Eigen::VectorXd& v, double radius);

struct DesignSolution {
  DesignWeights weights;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // accepted iterates, non-increasing
};

// Projected gradient descent with Barzilai-Borwein steps and backtracking,
// initialized at jittered uniform weights. Throws IdentifiabilityError when
// rank(B) < s (no finite objective exists).
DesignSolution solve_relaxation(const Eigen::MatrixXcd& b, int budget,
                                double tol = 1e-7, int max_iters = 5000);

// p_i = w_i / trace(w); equals w_i / m when the budget binds.
Eigen::VectorXd sampling_pmf(const DesignWeights& weights);

// m i.i.d. draws from the pmf, rejecting (and redrawing in full) any plan
// whose realized restricted operator has rank < s, up to max_rejects.
MeasurementPlan draw_plan(const Eigen::VectorXd& pmf, int m,
                          const Eigen::MatrixXcd& b, RandomStream& rng,
                          int max_rejects = 100);

// || (A' Psi_Lambda)^+ ||_F^2 * sigma2 via singular values.
double oracle_mse(const Eigen::MatrixXcd& restricted, double sigma2);

}  // namespace adaptsense
