// Seeded multi-trial experiment runner, median aggregation, and file
// emission (CSV of record, SVG plots, JSON manifest).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptsense/sensing.hpp"

namespace adaptsense {

enum class ExperimentKind { MseVsM, MseVsN, RatioVsN, Coherence, OneSparseValidate };

enum class SupportModel { Tree, Uniform };

std::string to_string(ExperimentKind kind);
std::string to_string(SupportModel model);

struct StrategySpec {
  StrategyKind kind = StrategyKind::NonadaptiveUniform;
  RecoveryAlg recovery = RecoveryAlg::Cosamp;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::MseVsM;
  std::vector<int> n_values;        // one entry unless sweeping n
  std::vector<int> m_values;        // explicit m sweep (mse-vs-m)
  std::optional<double> m_rule;     // m = round(rule * n)
  std::optional<int> m_fixed;       // fixed m for n sweeps
  int s = 10;
  double sigma2 = 1e-4;
  SupportModel support_model = SupportModel::Tree;
  std::vector<StrategySpec> strategies;
  int trials = 200;
  std::uint64_t master_seed = 12345;
  int workers = 0;  // 0 = hardware concurrency
};

// Parses and validates a config from JSON text; unknown keys are rejected.
ExperimentConfig parse_config_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);  // resolved form

struct TrialRecord {
  std::string strategy;
  int n = 0, m = 0, s = 0;
  std::uint64_t seed = 0;
  double sq_error = 0.0;
  bool support_correct = false;
};

struct SummaryRow {
  std::string strategy;
  int n = 0, m = 0, s = 0;
  double sigma2 = 0.0;
  double median_sq_error = 0.0;
  int trials = 0;
};

// One sweep point of an experiment.
struct SweepPoint {
  int n = 0;
  int m = 0;
};
std::vector<SweepPoint> resolve_sweep(const ExperimentConfig& cfg);

// Per-trial seeds: the planted signal is shared by every strategy at a
// sweep point (paired comparisons); measurement randomness is per strategy.
std::uint64_t signal_seed(std::uint64_t master, const SweepPoint& pt, int trial);
std::uint64_t strategy_seed(std::uint64_t master, const SweepPoint& pt,
                            const std::string& label, int trial);

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

// Median (average-of-middle-two for even counts) per strategy x sweep point,
// in config order.
std::vector<SummaryRow> median_aggregate(const std::vector<TrialRecord>& records,
                                         const ExperimentConfig& cfg);

// Writes summary.csv, per-figure SVG plots, the ratio CSV for ratio-vs-n,
// and manifest.json. All writes are atomic (temp file + rename).
void emit_outputs(const std::filesystem::path& outdir,
                  const std::vector<SummaryRow>& summary,
                  const ExperimentConfig& cfg);

// Coherence experiment outputs: the full table and the block-removal curve.
void emit_coherence_outputs(const std::filesystem::path& outdir, int n);

// One-sparse validation outputs: closed-form MSE vs Monte Carlo per support.
void emit_one_sparse_outputs(const std::filesystem::path& outdir,
                             const ExperimentConfig& cfg);

// Convenience: run whatever the config describes and write everything.
void run_and_emit(const ExperimentConfig& cfg, const std::filesystem::path& outdir);

std::string format_double(double v);  // 17 significant digits
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace adaptsense
