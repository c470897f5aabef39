// Closed-form Fourier-Haar coherence identities, the 1-sparse MSE laws for
// repeated measurements, block-restricted coherence curves, and the
// ridge-estimator risk validator.

#pragma once

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "adaptsense/transforms.hpp"

namespace adaptsense {

// | sum_{q=k}^{k+2^(a-1)-1} exp(-2 pi i j q / n) |, which is independent of
// the offset k; requires 1 <= j <= n-1.
double geometric_sum_magnitude(int n, int j, int a, int k);

// |<f_j, column lambda of H^*>| in closed form, including the j = 0 and
// lambda = 0 special cases.
double coherence_closed_form(int n, int j, int lambda);

// |<f_j, H^*_lambda>| for all rows j and columns lambda.
struct CoherenceTable {
  int n = 0;
  Eigen::MatrixXd values;  // (j, lambda)

  static CoherenceTable closed_form(int n);
  static CoherenceTable brute_force(const DftEnsemble& dft, const HaarBasis& haar);
};

// (min over lambda of max over j, max over lambda of max over j).
std::pair<double, double> minmax_bounds(int n);

// max over the remaining supports (and all j) of the coherence after
// removing whole wavelet blocks. The scaling column lambda = 0 is grouped
// with the lowest-frequency block a = log2(n) and is excluded with it.
double block_restricted_max(int n, const std::set<int>& excluded_blocks);

// One point per removal step of the top-down order log2(n), ..., 1.
struct BlockCurvePoint {
  int removed_blocks = 0;  // 0 means nothing removed
  double value = 0.0;
};
std::vector<BlockCurvePoint> block_restricted_curve(int n);

// MSE of the pseudoinverse estimator when row j is measured m times and the
// 1-sparse support is lambda: (1/m) / coherence^2 * sigma2. The two-stage
// variant spends only the second half of the budget on the repeated row.
double one_sparse_mse(int n, int m, int j, int lambda, double sigma2);
double one_sparse_mse_adaptive(int n, int m, int j, int lambda, double sigma2);

// Row index maximizing the coherence with column lambda.
int best_row_for_support(int n, int lambda);

// Noise term of the ridge estimator  (B^H B + (sigma2/rho2) I)^-1 B^H:
// sigma2 * sum_i ( s_i / (s_i^2 + sigma2/rho2) )^2  over singular values.
double bayes_risk_closed_form(const Eigen::MatrixXd& b, double sigma2, double rho2);

}  // namespace adaptsense
