// Sparse test-signal generation: supports, coefficients, measurement noise.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adaptsense/rng.hpp"
#include "adaptsense/transforms.hpp"

namespace adaptsense {

enum class SparsityBasis { Canonical, Haar };

struct NoiseModel {
  double variance = 0.0;  // sigma^2 >= 0
};

struct SparseSignal {
  int n = 0;
  int s = 0;
  std::vector<int> support;  // sorted, |support| = s
  Eigen::VectorXd alpha;     // length n, nonzero exactly on support
  SparsityBasis basis = SparsityBasis::Haar;
  Eigen::VectorXd x;         // canonical domain: H^* alpha (haar) or alpha
};

// s distinct indices drawn uniformly without replacement from {0,...,n-1}.
std::vector<int> sample_uniform_support(int n, int s, RandomStream& rng);

// Rooted wavelet-tree support: index 0 always chosen first, then s-1 rounds
// each adding a uniformly random index whose parent is already chosen.
// Node 0 has the single child 1; node j >= 1 has children 2j and 2j+1 when
// they are <= n-1.
std::vector<int> sample_tree_support(int n, int s, RandomStream& rng);

// i.i.d. N(sqrt(n), 1) on the support, zero elsewhere.
Eigen::VectorXd draw_coefficients(const std::vector<int>& support, int n,
                                  RandomStream& rng);

// Adds circularly-symmetric complex Gaussian noise with total per-entry
// variance model.variance (variance/2 in each real component).
Eigen::VectorXcd add_noise(const Eigen::VectorXcd& clean, const NoiseModel& model,
                           RandomStream& rng);

SparseSignal make_haar_signal(const HaarBasis& haar, std::vector<int> support,
                              const Eigen::VectorXd& alpha);
SparseSignal make_canonical_signal(int n, std::vector<int> support,
                                   const Eigen::VectorXd& alpha);

}  // namespace adaptsense
