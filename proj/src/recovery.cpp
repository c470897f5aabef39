#include "adaptsense/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace adaptsense {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

std::vector<int> largest_magnitudes(const VectorXcd& v, int k) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, n);
  // stable sort keeps the lowest index first among equal magnitudes
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

MatrixXcd gather_columns(const MatrixXcd& phi, const std::vector<int>& cols) {
  MatrixXcd sub(phi.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = phi.col(cols[c]);
  return sub;
}

// Least squares on the merged support; falls back to a trace-scaled ridge
// solve when the columns are dependent so the iteration never aborts.
VectorXcd merged_least_squares(const MatrixXcd& sub, const VectorXcd& y) {
  Eigen::ColPivHouseholderQR<MatrixXcd> qr(sub);
  if (qr.rank() == sub.cols()) return qr.solve(y);
  MatrixXcd gram = sub.adjoint() * sub;
  const double ridge = 1e-12 * gram.trace().real() / static_cast<double>(sub.cols());
  gram.diagonal().array() += std::complex<double>(ridge + 1e-300, 0.0);
  return gram.ldlt().solve(sub.adjoint() * y);
}

// Largest eigenvalue of Phi^H Phi (power iteration, overestimated slightly).
double lipschitz_bound(const MatrixXcd& phi) {
  const Eigen::Index n = phi.cols();
  VectorXcd v = VectorXcd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] += std::complex<double>(0.0, 1e-3 * static_cast<double>(i % 7));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 60; ++it) {
    VectorXcd w = phi * v;
    VectorXcd u = phi.adjoint() * w;
    const double lam_new = w.squaredNorm();
    const double un = u.norm();
    if (un == 0.0) return 1.0;
    v = u / un;
    if (it > 4 && std::abs(lam_new - lam) <= 1e-6 * lam_new) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
  }
  return 1.1 * lam + 1e-300;
}

VectorXcd soft_threshold(const VectorXcd& v, double thr) {
  VectorXcd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    out[i] = (mag > thr) ? v[i] * ((mag - thr) / mag) : std::complex<double>(0.0, 0.0);
  }
  return out;
}

struct FistaResult {
  VectorXcd a;
  double resid = 0.0;
  int iters = 0;
  bool converged = false;
};

// FISTA on  min lambda*||a||_1 + 0.5*||Phi a - y||^2  with gradient restart.
FistaResult run_fista(const MatrixXcd& phi, const VectorXcd& y, double lambda,
                      VectorXcd a0, double lip, double tol, int max_iters) {
  FistaResult out;
  VectorXcd a = std::move(a0);
  VectorXcd v = a;
  double t = 1.0;
  const double step = 1.0 / lip;
  int it = 0;
  for (; it < max_iters; ++it) {
    VectorXcd grad = phi.adjoint() * (phi * v - y);
    VectorXcd a_new = soft_threshold(v - step * grad, lambda * step);
    const double change = (a_new - a).norm();
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    VectorXcd v_new = a_new + ((t - 1.0) / t_new) * (a_new - a);
    // gradient restart: momentum pointing uphill
    if ((v - a_new).dot(a_new - a).real() > 0.0) {
      v_new = a_new;
      t = 1.0;
    } else {
      t = t_new;
    }
    const bool done = change <= tol * std::max(1.0, a.norm());
    a = std::move(a_new);
    v = std::move(v_new);
    if (done) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.a = std::move(a);
  out.resid = (phi * out.a - y).norm();
  out.iters = it;
  return out;
}

// CGLS on  min ||Phi d - r||  used to polish the final iterate onto the
// feasible set; returns the correction d.
VectorXcd cgls_correction(const MatrixXcd& phi, const VectorXcd& r0,
                          double target_resid, int max_iters) {
  VectorXcd d = VectorXcd::Zero(phi.cols());
  VectorXcd r = r0;
  VectorXcd s = phi.adjoint() * r;
  VectorXcd p = s;
  double gamma = s.squaredNorm();
  const double tiny = 1e-28 * std::max(1.0, r0.squaredNorm());
  for (int it = 0; it < max_iters && gamma > tiny; ++it) {
    VectorXcd q = phi * p;
    const double delta = q.squaredNorm();
    if (delta <= 0.0) break;
    const double alpha = gamma / delta;
    d += alpha * p;
    r -= alpha * q;
    if (r.norm() <= target_resid) break;
    s = phi.adjoint() * r;
    const double gamma_new = s.squaredNorm();
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  return d;
}

}  // namespace

CosampResult cosamp(const RecoveryProblem& problem, int max_iters) {
  const MatrixXcd& phi = problem.phi;
  const VectorXcd& y = problem.y;
  const int n = static_cast<int>(phi.cols());
  const int s = problem.sparsity;
  if (s < 1) throw std::invalid_argument("cosamp: sparsity must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("cosamp: max_iters must be >= 1");
  if (y.size() != phi.rows()) throw std::invalid_argument("cosamp: dimension mismatch");

  CosampResult best;
  best.coeffs = VectorXcd::Zero(n);
  const double ynorm = y.norm();
  if (ynorm == 0.0) return best;
  double best_resid = ynorm;

  VectorXcd r = y;
  double resid_prev = ynorm;
  std::vector<int> support_prev;
  for (int it = 1; it <= max_iters; ++it) {
    const VectorXcd proxy = phi.adjoint() * r;
    std::vector<int> merged = largest_magnitudes(proxy, 2 * s);
    merged.insert(merged.end(), support_prev.begin(), support_prev.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    const MatrixXcd sub = gather_columns(phi, merged);
    const VectorXcd b = merged_least_squares(sub, y);

    VectorXcd dense = VectorXcd::Zero(n);
    for (std::size_t c = 0; c < merged.size(); ++c) dense[merged[c]] = b[static_cast<Eigen::Index>(c)];
    const std::vector<int> pruned = largest_magnitudes(dense, s);

    VectorXcd coeffs = VectorXcd::Zero(n);
    for (int idx : pruned) coeffs[idx] = dense[idx];
    r = y - phi * coeffs;
    const double resid = r.norm();

    if (resid < best_resid) {
      best_resid = resid;
      best.coeffs = coeffs;
      best.iterations = it;
    }
    support_prev = pruned;
    if (resid >= resid_prev * (1.0 - 1e-8)) break;  // residual stalled
    if (resid <= 1e-13 * ynorm) break;
    resid_prev = resid;
  }

  for (int i = 0; i < n; ++i) {
    if (best.coeffs[i] != std::complex<double>(0.0, 0.0)) best.support.push_back(i);
  }
  return best;
}

double bpdn_epsilon(double sigma2, int m) {
  const double sigma = std::sqrt(sigma2);
  const double rm = std::sqrt(static_cast<double>(m));
  return sigma * rm * (1.0 + 2.0 / rm);
}

BpdnResult bpdn(const RecoveryProblem& problem, double epsilon, int max_iters) {
  if (epsilon < 0.0) throw std::invalid_argument("bpdn: epsilon must be >= 0");
  const MatrixXcd& phi = problem.phi;
  const VectorXcd& y = problem.y;
  if (y.size() != phi.rows()) throw std::invalid_argument("bpdn: dimension mismatch");
  const int n = static_cast<int>(phi.cols());

  BpdnResult out;
  out.coeffs = VectorXcd::Zero(n);
  const double ynorm = y.norm();
  if (ynorm <= epsilon) return out;  // zero is feasible and l1-optimal

  const double lambda_max = (phi.adjoint() * y).cwiseAbs().maxCoeff();
  if (lambda_max <= 0.0) {
    out.converged = false;  // range(Phi) cannot reach y at all
    return out;
  }
  const double lip = lipschitz_bound(phi);
  int budget = max_iters;

  if (epsilon <= 1e-12 * ynorm) {
    // equality-constrained case: penalty continuation, then project the
    // iterate onto {a : Phi a = y} with a least-squares correction
    VectorXcd a = VectorXcd::Zero(n);
    double lambda = 0.25 * lambda_max;
    bool conv = false;
    for (int stage = 0; stage < 12 && budget > 0; ++stage) {
      const double tol = (stage < 11) ? 1e-4 : 1e-6;
      FistaResult st = run_fista(phi, y, lambda, std::move(a), lip, tol,
                                 std::min(budget, std::max(50, budget / 6)));
      a = std::move(st.a);
      budget -= st.iters;
      out.iterations += st.iters;
      conv = st.converged;
      lambda *= 0.25;
    }
    a += cgls_correction(phi, y - phi * a, 1e-13 * ynorm, 2 * n);
    out.coeffs = std::move(a);
    out.converged = conv;
    return out;
  }

  // Bisection on the penalty: the residual grows with lambda, so the best
  // feasible point sits at the largest lambda with resid <= epsilon.
  double lo = 1e-9 * lambda_max;  // near least-squares
  double hi = lambda_max;         // resid(lambda_max) = ||y|| > epsilon
  VectorXcd warm = VectorXcd::Zero(n);
  VectorXcd best;
  double best_l1 = std::numeric_limits<double>::infinity();
  bool feasible_found = false;
  for (int step = 0; step < 24 && budget > 0; ++step) {
    const double mid = std::sqrt(lo * hi);
    FistaResult st = run_fista(phi, y, mid, warm, lip, 1e-5,
                               std::min(budget, 400));
    budget -= st.iters;
    out.iterations += st.iters;
    warm = st.a;
    if (st.resid <= epsilon) {
      const double l1 = st.a.cwiseAbs().sum();
      if (!feasible_found || l1 < best_l1) {
        best = st.a;
        best_l1 = l1;
        feasible_found = true;
      }
      if (st.resid >= 0.98 * epsilon) break;  // hugging the constraint
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi / lo < 1.02) break;
  }
  if (feasible_found) {
    // refine at the feasible end of the bracket
    FistaResult st = run_fista(phi, y, lo, std::move(warm), lip, 1e-6,
                               std::max(0, budget));
    out.iterations += st.iters;
    if (st.resid <= epsilon && st.a.cwiseAbs().sum() < best_l1) best = std::move(st.a);
    out.coeffs = std::move(best);
    out.converged = true;
    return out;
  }
  // never feasible within budget: pull the iterate toward the epsilon-ball
  VectorXcd a = std::move(warm);
  a += cgls_correction(phi, y - phi * a, 0.995 * epsilon, 2 * n);
  out.coeffs = std::move(a);
  out.converged = (phi * out.coeffs - y).norm() <= epsilon;
  return out;
}

std::vector<int> top_s_threshold(const Eigen::VectorXcd& coeffs, int s) {
  if (s < 1) throw std::invalid_argument("top_s_threshold: s must be >= 1");
  return largest_magnitudes(coeffs, s);
}

Eigen::VectorXcd ls_on_support(const Eigen::VectorXcd& y,
                               const Eigen::MatrixXcd& phi_support) {
  if (y.size() != phi_support.rows()) {
    throw std::invalid_argument("ls_on_support: dimension mismatch");
  }
  Eigen::JacobiSVD<MatrixXcd> svd(phi_support,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] <= 1e-10 * sv[0] || sv[0] == 0.0) {
    throw IdentifiabilityError("design does not identify support");
  }
  return svd.solve(y);
}

}  // namespace adaptsense
