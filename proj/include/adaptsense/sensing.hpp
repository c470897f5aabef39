// End-to-end sensing strategies: nonadaptive (uniform / variable-density),
// two-stage adaptive, and oracle adaptive.

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "adaptsense/design.hpp"
#include "adaptsense/recovery.hpp"
#include "adaptsense/signals.hpp"
#include "adaptsense/transforms.hpp"

namespace adaptsense {

enum class StrategyKind {
  NonadaptiveUniform,
  NonadaptiveVds,
  AdaptiveUniform,
  AdaptiveVds,
  Oracle,
};

enum class RecoveryAlg { Cosamp, L1 };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::NonadaptiveUniform;
  RecoveryAlg recovery = RecoveryAlg::Cosamp;  // ignored by the oracle
  int m = 0;
  int s = 0;
  double sigma2 = 0.0;
  int cosamp_max_iters = 50;
  int bpdn_max_iters = 20000;
};

std::string strategy_label(const StrategyConfig& cfg);
StrategyKind parse_strategy_kind(const std::string& name);
RecoveryAlg parse_recovery_alg(const std::string& name);
std::string to_string(StrategyKind kind);
std::string to_string(RecoveryAlg alg);

// Shared immutable per-dimension state: the ensemble, the sparsity basis,
// and the full effective operator A Psi (one row per candidate measurement).
struct SensingContext {
  std::shared_ptr<const DftEnsemble> dft;
  std::shared_ptr<const HaarBasis> haar;  // null for the canonical basis
  std::shared_ptr<const Eigen::MatrixXcd> effective;
  SparsityBasis basis = SparsityBasis::Haar;

  int n() const { return dft->size(); }
};

SensingContext make_context(int n, SparsityBasis basis = SparsityBasis::Haar);

struct SensingOutcome {
  Eigen::VectorXcd alpha_hat;  // length n
  Eigen::VectorXcd x_hat;      // canonical domain
  std::vector<int> support_hat;
  MeasurementPlan plan;
  double sq_error = 0.0;
  bool flagged = false;  // rank failure / rejection-exhaustion fallback
  bool support_correct = false;
};

// Variable-density pmf over DFT rows: p_j proportional to
// 1 / max(1, min(j, n-j)), concentrating on the low frequencies.
Eigen::VectorXd vds_pmf(int n);
Eigen::VectorXd uniform_row_pmf(int n);

// Noisy measurements of the signal under the given plan.
Eigen::VectorXcd measure(const SensingContext& ctx, const MeasurementPlan& plan,
                         const SparseSignal& signal, double sigma2,
                         RandomStream& rng);

SensingOutcome run_nonadaptive(const SensingContext& ctx, const SparseSignal& signal,
                               const StrategyConfig& cfg, RandomStream& rng);
SensingOutcome run_adaptive(const SensingContext& ctx, const SparseSignal& signal,
                            const StrategyConfig& cfg, RandomStream& rng);
SensingOutcome run_oracle(const SensingContext& ctx, const SparseSignal& signal,
                          const StrategyConfig& cfg, RandomStream& rng);
SensingOutcome run_strategy(const SensingContext& ctx, const SparseSignal& signal,
                            const StrategyConfig& cfg, RandomStream& rng);

}  // namespace adaptsense
