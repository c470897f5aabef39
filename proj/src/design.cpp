#include "adaptsense/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptsense {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weighted Gram M = B^H diag(w) B.
MatrixXcd weighted_gram(const VectorXd& w, const MatrixXcd& b) {
  const Eigen::Index s = b.cols();
  MatrixXcd m(s, s);
  m.noalias() = b.adjoint() * (w.asDiagonal() * b);
  return m;
}

// Cholesky of the Gram; false when not (numerically) positive definite.
bool factor_gram(const MatrixXcd& m, Eigen::LLT<MatrixXcd>& llt) {
  llt.compute(m);
  if (llt.info() != Eigen::Success) return false;
  const auto& l = llt.matrixLLT();
  const double scale = m.trace().real() / static_cast<double>(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (l(i, i).real() <= 1e-13 * std::sqrt(std::max(scale, 1e-300))) return false;
  }
  return true;
}

double objective_from_llt(const Eigen::LLT<MatrixXcd>& llt, Eigen::Index s) {
  const MatrixXcd inv = llt.solve(MatrixXcd::Identity(s, s));
  return inv.trace().real();
}

}  // namespace

double design_objective(const VectorXd& w, const MatrixXcd& b) {
  if (w.size() != b.rows()) {
    throw std::invalid_argument("design_objective: weight/operator size mismatch");
  }
  Eigen::LLT<MatrixXcd> llt;
  if (!factor_gram(weighted_gram(w, b), llt)) return kInf;
  return objective_from_llt(llt, b.cols());
}

VectorXd design_gradient(const VectorXd& w, const MatrixXcd& b) {
  if (w.size() != b.rows()) {
    throw std::invalid_argument("design_gradient: weight/operator size mismatch");
  }
  Eigen::LLT<MatrixXcd> llt;
  if (!factor_gram(weighted_gram(w, b), llt)) {
    throw std::invalid_argument("design_gradient: singular weighted Gram");
  }
  // grad_i = -|| M^-1 b_i ||^2, all rows at once via M^-1 B^H
  const MatrixXcd solved = llt.solve(b.adjoint());  // s x n
  VectorXd grad(b.rows());
  for (Eigen::Index i = 0; i < b.rows(); ++i) grad[i] = -solved.col(i).squaredNorm();
  return grad;
}

VectorXd project_weight_budget(const VectorXd& v, double radius) {
  VectorXd clipped = v.cwiseMax(0.0);
  const double total = clipped.sum();
  if (total <= radius) return clipped;
  // project onto the scaled simplex { x >= 0, sum(x) = radius }
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double cand = (cum - radius) / static_cast<double>(k + 1);
    if (u[k] - cand > 0.0) tau = cand;
  }
  return (v.array() - tau).cwiseMax(0.0);
}

DesignSolution solve_relaxation(const MatrixXcd& b, int budget, double tol,
                                int max_iters) {
  const Eigen::Index n = b.rows();
  const Eigen::Index s = b.cols();
  if (budget < 1) throw std::invalid_argument("solve_relaxation: budget must be >= 1");
  {
    Eigen::ColPivHouseholderQR<MatrixXcd> qr(b);
    if (qr.rank() < s) {
      throw IdentifiabilityError("support not identifiable from ensemble");
    }
  }

  const double m = static_cast<double>(budget);
  // uniform start with deterministic 1% jitter to break row symmetries
  RandomStream jitter(0x9e3779b97f4a7c15ULL);
  VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = (m / static_cast<double>(n)) * (1.0 + 0.01 * (2.0 * jitter.uniform01() - 1.0));
  }
  w = project_weight_budget(w, m);

  Eigen::LLT<MatrixXcd> llt;
  const auto evaluate = [&](const VectorXd& ww) -> double {
    if (!factor_gram(weighted_gram(ww, b), llt)) return kInf;
    return objective_from_llt(llt, s);
  };
  // grad_i = -|| M^-1 b_i ||^2 from the factor of the current iterate
  const auto gradient_from_factor = [&]() -> VectorXd {
    const MatrixXcd solved = llt.solve(b.adjoint());  // s x n
    return -solved.colwise().squaredNorm().transpose();
  };

  DesignSolution sol;
  double f = evaluate(w);
  sol.objective_history.push_back(f);

  double step = m / static_cast<double>(n);  // initial scale
  VectorXd grad = gradient_from_factor();
  VectorXd w_prev = w, grad_prev = grad;
  bool have_prev = false;
  double stall_ref = f;
  int stall_count = 0;

  int it = 0;
  for (; it < max_iters; ++it) {
    // stationarity: unit-step projected gradient
    const VectorXd pg = w - project_weight_budget(w - grad, m);
    if (pg.norm() <= tol * (1.0 + std::abs(f))) {
      sol.converged = true;
      break;
    }

    // Barzilai-Borwein step when history is available
    if (have_prev) {
      const VectorXd dw = w - w_prev;
      const VectorXd dg = grad - grad_prev;
      const double denom = dw.dot(dg);
      if (denom > 0.0) {
        step = dw.squaredNorm() / denom;
      } else {
        step *= 4.0;
      }
    }
    const double step_cap = 1e12 * (m / (grad.norm() + 1e-300));
    step = std::clamp(step, 1e-16, step_cap);

    // backtracking line search along the projection arc (Armijo)
    double f_new = kInf;
    VectorXd w_new;
    bool accepted = false;
    double t = step;
    for (int ls = 0; ls < 60; ++ls) {
      w_new = project_weight_budget(w - t * grad, m);
      f_new = evaluate(w_new);
      const double decrease = grad.dot(w_new - w);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || f_new >= f) break;  // no further progress

    w_prev = w;
    grad_prev = grad;
    have_prev = true;
    w = std::move(w_new);
    f = f_new;
    step = t * 2.0;
    grad = gradient_from_factor();  // llt still holds the accepted iterate
    sol.objective_history.push_back(f);

    // the descent has flattened far below every validation tolerance
    if (stall_ref - f <= 1e-12 * (1.0 + std::abs(f))) {
      if (++stall_count >= 60) {
        sol.converged = true;
        ++it;
        break;
      }
    } else {
      stall_ref = f;
      stall_count = 0;
    }
  }

  sol.weights.w = std::move(w);
  sol.weights.budget = budget;
  sol.objective = f;
  sol.iterations = it;
  return sol;
}

VectorXd sampling_pmf(const DesignWeights& weights) {
  const double trace = weights.w.sum();
  if (!(trace > 0.0)) {
    throw std::invalid_argument("sampling_pmf: weights must have positive trace");
  }
  // w_i / m when the budget binds; normalizing by the trace is the unique
  // consistent extension when it does not
  return weights.w / trace;
}

MeasurementPlan draw_plan(const VectorXd& pmf, int m, const MatrixXcd& b,
                          RandomStream& rng, int max_rejects) {
  const Eigen::Index s = b.cols();
  if (m < s) throw std::invalid_argument("draw_plan: need m >= s");
  if (pmf.size() != b.rows()) throw std::invalid_argument("draw_plan: pmf/operator size mismatch");
  const CumulativePmf sampler(std::vector<double>(pmf.data(), pmf.data() + pmf.size()));

  for (int attempt = 0; attempt < max_rejects; ++attempt) {
    MeasurementPlan plan;
    plan.rows.resize(m);
    for (int i = 0; i < m; ++i) plan.rows[i] = sampler.draw(rng);
    MatrixXcd restricted(m, s);
    for (int i = 0; i < m; ++i) restricted.row(i) = b.row(plan.rows[i]);
    Eigen::ColPivHouseholderQR<MatrixXcd> qr(restricted);
    if (qr.rank() >= s) return plan;
  }
  throw IdentifiabilityError("design cannot identify support");
}

double oracle_mse(const MatrixXcd& restricted, double sigma2) {
  Eigen::JacobiSVD<MatrixXcd> svd(restricted);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0 || sv[sv.size() - 1] <= 1e-10 * sv[0]) {
    throw IdentifiabilityError("design does not identify support");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) acc += 1.0 / (sv[i] * sv[i]);
  return acc * sigma2;
}

}  // namespace adaptsense
