#include "adaptsense/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adaptsense {

std::vector<int> sample_uniform_support(int n, int s, RandomStream& rng) {
  if (s < 1 || s > n) {
    throw std::invalid_argument("sample_uniform_support: need 1 <= s <= n");
  }
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < s; ++i) {
    const int j = i + rng.uniform_index(n - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> support(pool.begin(), pool.begin() + s);
  std::sort(support.begin(), support.end());
  return support;
}

std::vector<int> sample_tree_support(int n, int s, RandomStream& rng) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("sample_tree_support: n must be a power of two");
  }
  if (s < 1 || s > n) {
    throw std::invalid_argument("sample_tree_support: need 1 <= s <= n");
  }
  std::vector<bool> chosen(n, false);
  std::vector<int> support;
  support.reserve(s);
  chosen[0] = true;
  support.push_back(0);
  std::vector<int> frontier;  // unchosen nodes whose parent is chosen
  if (n > 1) frontier.push_back(1);
  for (int round = 1; round < s; ++round) {
    const int pick = rng.uniform_index(static_cast<int>(frontier.size()));
    const int node = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    chosen[node] = true;
    support.push_back(node);
    const long left = 2L * node;
    if (left <= n - 1 && node >= 1) {
      frontier.push_back(static_cast<int>(left));
      if (left + 1 <= n - 1) frontier.push_back(static_cast<int>(left + 1));
    }
  }
  std::sort(support.begin(), support.end());
  return support;
}

Eigen::VectorXd draw_coefficients(const std::vector<int>& support, int n,
                                  RandomStream& rng) {
  if (support.empty()) {
    throw std::invalid_argument("draw_coefficients: empty support");
  }
  const double mean = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  for (int idx : support) {
    if (idx < 0 || idx >= n) {
      throw std::invalid_argument("draw_coefficients: index out of range");
    }
    alpha[idx] = mean + rng.gaussian();
  }
  return alpha;
}

Eigen::VectorXcd add_noise(const Eigen::VectorXcd& clean, const NoiseModel& model,
                           RandomStream& rng) {
  if (model.variance < 0.0) {
    throw std::invalid_argument("add_noise: negative variance");
  }
  if (model.variance == 0.0) return clean;
  Eigen::VectorXcd noisy = clean;
  for (Eigen::Index i = 0; i < noisy.size(); ++i) {
    noisy[i] += rng.complex_gaussian(model.variance);
  }
  return noisy;
}

SparseSignal make_haar_signal(const HaarBasis& haar, std::vector<int> support,
                              const Eigen::VectorXd& alpha) {
  SparseSignal sig;
  sig.n = haar.size();
  sig.s = static_cast<int>(support.size());
  sig.support = std::move(support);
  sig.alpha = alpha;
  sig.basis = SparsityBasis::Haar;
  sig.x = haar.synthesis(alpha);
  return sig;
}

SparseSignal make_canonical_signal(int n, std::vector<int> support,
                                   const Eigen::VectorXd& alpha) {
  SparseSignal sig;
  sig.n = n;
  sig.s = static_cast<int>(support.size());
  sig.support = std::move(support);
  sig.alpha = alpha;
  sig.basis = SparsityBasis::Canonical;
  sig.x = alpha;
  return sig;
}

}  // namespace adaptsense
