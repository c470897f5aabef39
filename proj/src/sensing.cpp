#include "adaptsense/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adaptsense {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

MatrixXcd gather_rows(const MatrixXcd& g, const std::vector<int>& rows) {
  MatrixXcd out(static_cast<Eigen::Index>(rows.size()), g.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = g.row(rows[i]);
  return out;
}

MatrixXcd gather_columns(const MatrixXcd& g, const std::vector<int>& cols) {
  MatrixXcd out(g.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = g.col(cols[c]);
  return out;
}

std::vector<int> draw_rows(const CumulativePmf& sampler, int m, RandomStream& rng) {
  std::vector<int> rows(m);
  for (int i = 0; i < m; ++i) rows[i] = sampler.draw(rng);
  return rows;
}

CumulativePmf make_sampler(const VectorXd& pmf) {
  return CumulativePmf(std::vector<double>(pmf.data(), pmf.data() + pmf.size()));
}

// Support estimate from the configured recovery algorithm.
std::vector<int> estimate_support(const MatrixXcd& phi, const VectorXcd& y,
                                  const StrategyConfig& cfg) {
  RecoveryProblem prob{phi, y, cfg.s, cfg.sigma2};
  if (cfg.recovery == RecoveryAlg::Cosamp) {
    return cosamp(prob, cfg.cosamp_max_iters).support;
  }
  const BpdnResult res = bpdn(prob, bpdn_epsilon(cfg.sigma2, static_cast<int>(y.size())),
                              cfg.bpdn_max_iters);
  return top_s_threshold(res.coeffs, cfg.s);
}

VectorXcd synthesize(const SensingContext& ctx, const VectorXcd& alpha) {
  if (ctx.basis == SparsityBasis::Haar) return ctx.haar->synthesis(alpha);
  return alpha;
}

// Pseudoinverse coefficients on the estimated support; falls back to the
// zero estimate (error = ||x||^2) when the restricted system is
// rank-deficient, so trial statistics stay well-defined.
SensingOutcome finalize(const SensingContext& ctx, const SparseSignal& signal,
                        const MatrixXcd& phi, const VectorXcd& y,
                        std::vector<int> support_hat, MeasurementPlan plan,
                        bool flagged) {
  SensingOutcome out;
  out.plan = std::move(plan);
  out.flagged = flagged;
  out.alpha_hat = VectorXcd::Zero(ctx.n());
  if (!support_hat.empty()) {
    try {
      const VectorXcd coeffs = ls_on_support(y, gather_columns(phi, support_hat));
      for (std::size_t c = 0; c < support_hat.size(); ++c) {
        out.alpha_hat[support_hat[c]] = coeffs[static_cast<Eigen::Index>(c)];
      }
      out.support_hat = std::move(support_hat);
    } catch (const IdentifiabilityError&) {
      out.alpha_hat.setZero();
      out.support_hat.clear();
      out.flagged = true;
    }
  }
  out.x_hat = synthesize(ctx, out.alpha_hat);
  out.sq_error = (out.alpha_hat - signal.alpha.cast<std::complex<double>>()).squaredNorm();
  out.support_correct = (out.support_hat == signal.support);
  return out;
}

}  // namespace

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::NonadaptiveUniform: return "nonadaptive-uniform";
    case StrategyKind::NonadaptiveVds: return "nonadaptive-vds";
    case StrategyKind::AdaptiveUniform: return "adaptive-uniform";
    case StrategyKind::AdaptiveVds: return "adaptive-vds";
    case StrategyKind::Oracle: return "oracle";
  }
  return "?";
}

std::string to_string(RecoveryAlg alg) {
  return alg == RecoveryAlg::Cosamp ? "cosamp" : "l1";
}

StrategyKind parse_strategy_kind(const std::string& name) {
  if (name == "nonadaptive-uniform") return StrategyKind::NonadaptiveUniform;
  if (name == "nonadaptive-vds") return StrategyKind::NonadaptiveVds;
  if (name == "adaptive-uniform") return StrategyKind::AdaptiveUniform;
  if (name == "adaptive-vds") return StrategyKind::AdaptiveVds;
  if (name == "oracle") return StrategyKind::Oracle;
  throw std::invalid_argument("unknown strategy kind: " + name);
}

RecoveryAlg parse_recovery_alg(const std::string& name) {
  if (name == "cosamp") return RecoveryAlg::Cosamp;
  if (name == "l1") return RecoveryAlg::L1;
  throw std::invalid_argument("unknown recovery algorithm: " + name);
}

std::string strategy_label(const StrategyConfig& cfg) {
  if (cfg.kind == StrategyKind::Oracle) return "oracle";
  return to_string(cfg.kind) + "+" + to_string(cfg.recovery);
}

SensingContext make_context(int n, SparsityBasis basis) {
  SensingContext ctx;
  ctx.dft = std::make_shared<DftEnsemble>(n);
  ctx.basis = basis;
  if (basis == SparsityBasis::Haar) {
    ctx.haar = std::make_shared<HaarBasis>(n);
    ctx.effective = std::make_shared<Eigen::MatrixXcd>(
        fourier_synthesis_product(*ctx.dft, *ctx.haar));
  } else {
    Eigen::MatrixXcd f(n, n);
    for (int j = 0; j < n; ++j) f.row(j) = ctx.dft->row(j).transpose();
    ctx.effective = std::make_shared<Eigen::MatrixXcd>(std::move(f));
  }
  return ctx;
}

VectorXd vds_pmf(int n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("vds_pmf: n must be a power of two");
  }
  VectorXd p(n);
  for (int j = 0; j < n; ++j) {
    const int dist = std::min(j, n - j);
    p[j] = 1.0 / static_cast<double>(std::max(1, dist));
  }
  return p / p.sum();
}

VectorXd uniform_row_pmf(int n) {
  return VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

VectorXcd measure(const SensingContext& ctx, const MeasurementPlan& plan,
                  const SparseSignal& signal, double sigma2, RandomStream& rng) {
  const MatrixXcd& g = *ctx.effective;
  VectorXcd clean(static_cast<Eigen::Index>(plan.rows.size()));
  for (std::size_t i = 0; i < plan.rows.size(); ++i) {
    std::complex<double> acc = 0.0;
    for (int t : signal.support) acc += g(plan.rows[i], t) * signal.alpha[t];
    clean[static_cast<Eigen::Index>(i)] = acc;
  }
  return add_noise(clean, NoiseModel{sigma2}, rng);
}

SensingOutcome run_nonadaptive(const SensingContext& ctx, const SparseSignal& signal,
                               const StrategyConfig& cfg, RandomStream& rng) {
  if (cfg.kind != StrategyKind::NonadaptiveUniform && cfg.kind != StrategyKind::NonadaptiveVds) {
    throw std::invalid_argument("run_nonadaptive: wrong strategy kind");
  }
  const int n = ctx.n();
  const VectorXd pmf = (cfg.kind == StrategyKind::NonadaptiveVds) ? vds_pmf(n) : uniform_row_pmf(n);
  MeasurementPlan plan{draw_rows(make_sampler(pmf), cfg.m, rng)};
  const VectorXcd y = measure(ctx, plan, signal, cfg.sigma2, rng);
  const MatrixXcd phi = gather_rows(*ctx.effective, plan.rows);
  std::vector<int> support_hat = estimate_support(phi, y, cfg);
  return finalize(ctx, signal, phi, y, std::move(support_hat), std::move(plan), false);
}

SensingOutcome run_adaptive(const SensingContext& ctx, const SparseSignal& signal,
                            const StrategyConfig& cfg, RandomStream& rng) {
  if (cfg.kind != StrategyKind::AdaptiveUniform && cfg.kind != StrategyKind::AdaptiveVds) {
    throw std::invalid_argument("run_adaptive: wrong strategy kind");
  }
  if (cfg.m < 2) throw std::invalid_argument("run_adaptive: need m >= 2");
  const int n = ctx.n();
  const int m1 = cfg.m / 2;
  const int m2 = cfg.m - m1;
  const VectorXd stage1_pmf =
      (cfg.kind == StrategyKind::AdaptiveVds) ? vds_pmf(n) : uniform_row_pmf(n);

  MeasurementPlan plan1{draw_rows(make_sampler(stage1_pmf), m1, rng)};
  const VectorXcd y1 = measure(ctx, plan1, signal, cfg.sigma2, rng);
  const MatrixXcd phi1 = gather_rows(*ctx.effective, plan1.rows);
  StrategyConfig stage1_cfg = cfg;
  stage1_cfg.m = m1;
  const std::vector<int> support_est = estimate_support(phi1, y1, stage1_cfg);

  // Stage 2: A-optimal design on the estimated support. An empty estimate
  // (zero stage-1 reconstruction) degenerates to nonadaptive continuation.
  bool flagged = false;
  MeasurementPlan plan2;
  if (support_est.empty()) {
    plan2.rows = draw_rows(make_sampler(stage1_pmf), m2, rng);
  } else {
    const MatrixXcd b = gather_columns(*ctx.effective, support_est);
    const DesignSolution sol = solve_relaxation(b, m2);
    try {
      plan2 = draw_plan(sampling_pmf(sol.weights), m2, b, rng);
    } catch (const IdentifiabilityError&) {
      // degenerate design: stage-1-only estimate
      SensingOutcome out = finalize(ctx, signal, phi1, y1, support_est, plan1, true);
      return out;
    }
  }
  const VectorXcd y2 = measure(ctx, plan2, signal, cfg.sigma2, rng);

  MeasurementPlan plan;
  plan.rows = plan1.rows;
  plan.rows.insert(plan.rows.end(), plan2.rows.begin(), plan2.rows.end());
  VectorXcd y(cfg.m);
  y << y1, y2;
  const MatrixXcd phi = gather_rows(*ctx.effective, plan.rows);

  std::vector<int> support_hat = estimate_support(phi, y, cfg);
  return finalize(ctx, signal, phi, y, std::move(support_hat), std::move(plan), flagged);
}

SensingOutcome run_oracle(const SensingContext& ctx, const SparseSignal& signal,
                          const StrategyConfig& cfg, RandomStream& rng) {
  if (cfg.kind != StrategyKind::Oracle) {
    throw std::invalid_argument("run_oracle: wrong strategy kind");
  }
  const MatrixXcd b = gather_columns(*ctx.effective, signal.support);
  const DesignSolution sol = solve_relaxation(b, cfg.m);
  MeasurementPlan plan = draw_plan(sampling_pmf(sol.weights), cfg.m, b, rng);
  const VectorXcd y = measure(ctx, plan, signal, cfg.sigma2, rng);
  const MatrixXcd phi = gather_rows(*ctx.effective, plan.rows);
  return finalize(ctx, signal, phi, y, signal.support, std::move(plan), false);
}

SensingOutcome run_strategy(const SensingContext& ctx, const SparseSignal& signal,
                            const StrategyConfig& cfg, RandomStream& rng) {
  switch (cfg.kind) {
    case StrategyKind::NonadaptiveUniform:
    case StrategyKind::NonadaptiveVds:
      return run_nonadaptive(ctx, signal, cfg, rng);
    case StrategyKind::AdaptiveUniform:
    case StrategyKind::AdaptiveVds:
      return run_adaptive(ctx, signal, cfg, rng);
    case StrategyKind::Oracle:
      return run_oracle(ctx, signal, cfg, rng);
  }
  throw std::invalid_argument("run_strategy: unknown kind");
}

}  // namespace adaptsense
