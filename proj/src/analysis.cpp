#include "adaptsense/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace adaptsense {

namespace {
constexpr double kPi = 3.14159265358979323846;

// 1 - cos(2 theta) = 2 sin^2(theta), computed in the stable form
double one_minus_cos(double half_angle) {
  const double s = std::sin(half_angle);
  return 2.0 * s * s;
}
}  // namespace

double geometric_sum_magnitude(int n, int j, int a, int k) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("geometric_sum_magnitude: n must be a power of two");
  }
  const int levels = log2_exact(n);
  if (j < 1 || j > n - 1) {
    throw std::invalid_argument("geometric_sum_magnitude: need 1 <= j <= n-1");
  }
  if (a < 1 || a > levels) {
    throw std::invalid_argument("geometric_sum_magnitude: block out of range");
  }
  const int half = (1 << a) / 2;
  if (k < 0 || k > n - half) {
    throw std::invalid_argument("geometric_sum_magnitude: offset out of range");
  }
  (void)k;  // the magnitude does not depend on the offset
  const double num = one_minus_cos(static_cast<double>(half) * kPi * j / n);
  const double den = one_minus_cos(kPi * j / n);
  return std::sqrt(num / den);
}

double coherence_closed_form(int n, int j, int lambda) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("coherence_closed_form: n must be a power of two");
  }
  if (j < 0 || j >= n || lambda < 0 || lambda >= n) {
    throw std::invalid_argument("coherence_closed_form: index out of range");
  }
  if (j == 0) return lambda == 0 ? 1.0 : 0.0;
  if (lambda == 0) return 0.0;
  int p = 0;
  while ((1 << (p + 1)) <= lambda) ++p;
  const int a = log2_exact(n) - p;
  const double num = one_minus_cos(static_cast<double>(1 << (a - 1)) * kPi * j / n);
  const double den = one_minus_cos(kPi * j / n);
  return num / (std::sqrt(den) * std::sqrt(static_cast<double>(n) * (1 << (a - 1))));
}

CoherenceTable CoherenceTable::closed_form(int n) {
  CoherenceTable t;
  t.n = n;
  t.values.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int lam = 0; lam < n; ++lam) t.values(j, lam) = coherence_closed_form(n, j, lam);
  }
  return t;
}

CoherenceTable CoherenceTable::brute_force(const DftEnsemble& dft, const HaarBasis& haar) {
  CoherenceTable t;
  t.n = dft.size();
  t.values = fourier_synthesis_product(dft, haar).cwiseAbs();
  return t;
}

std::pair<double, double> minmax_bounds(int n) {
  const CoherenceTable table = CoherenceTable::closed_form(n);
  const Eigen::VectorXd best_row = table.values.colwise().maxCoeff();
  return {best_row.minCoeff(), best_row.maxCoeff()};
}

double block_restricted_max(int n, const std::set<int>& excluded_blocks) {
  if (!is_power_of_two(n) || n < 2) {
    throw std::invalid_argument("block_restricted_max: n must be a power of two >= 2");
  }
  const int levels = log2_exact(n);
  for (int a : excluded_blocks) {
    if (a < 1 || a > levels) {
      throw std::invalid_argument("block_restricted_max: block out of range");
    }
  }
  const bool scaling_excluded = excluded_blocks.count(levels) > 0;
  const CoherenceTable table = CoherenceTable::closed_form(n);
  double best = -1.0;
  for (int lam = 0; lam < n; ++lam) {
    if (lam == 0) {
      if (scaling_excluded) continue;
    } else {
      int p = 0;
      while ((1 << (p + 1)) <= lam) ++p;
      if (excluded_blocks.count(levels - p) > 0) continue;
    }
    best = std::max(best, table.values.col(lam).maxCoeff());
  }
  if (best < 0.0) {
    throw std::invalid_argument("block_restricted_max: all supports excluded");
  }
  return best;
}

std::vector<BlockCurvePoint> block_restricted_curve(int n) {
  const int levels = log2_exact(n);
  std::vector<BlockCurvePoint> curve;
  std::set<int> excluded;
  curve.push_back({0, block_restricted_max(n, excluded)});
  for (int a = levels; a >= 2; --a) {
    excluded.insert(a);
    curve.push_back({levels - a + 1, block_restricted_max(n, excluded)});
  }
  return curve;
}

double one_sparse_mse(int n, int m, int j, int lambda, double sigma2) {
  if (m < 1) throw std::invalid_argument("one_sparse_mse: m must be >= 1");
  const double c = coherence_closed_form(n, j, lambda);
  if (c <= 0.0) {
    throw std::invalid_argument("one_sparse_mse: measurement uninformative for this support");
  }
  return sigma2 / (static_cast<double>(m) * c * c);
}

double one_sparse_mse_adaptive(int n, int m, int j, int lambda, double sigma2) {
  if (m < 2) throw std::invalid_argument("one_sparse_mse_adaptive: m must be >= 2");
  return 2.0 * one_sparse_mse(n, m, j, lambda, sigma2);
}

int best_row_for_support(int n, int lambda) {
  int best_j = 0;
  double best = -1.0;
  for (int j = 0; j < n; ++j) {
    const double c = coherence_closed_form(n, j, lambda);
    if (c > best) {
      best = c;
      best_j = j;
    }
  }
  return best_j;
}

double bayes_risk_closed_form(const Eigen::MatrixXd& b, double sigma2, double rho2) {
  if (rho2 <= 0.0) throw std::invalid_argument("bayes_risk_closed_form: rho2 must be > 0");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  const double shift = sigma2 / rho2;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()[i];
    const double r = s / (s * s + shift);
    acc += r * r;
  }
  return sigma2 * acc;
}

}  // namespace adaptsense
