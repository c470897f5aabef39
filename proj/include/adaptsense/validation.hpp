// Acceptance checks: closed-form identities, Monte Carlo validators, solver
// certification, error-trend reproduction, and output determinism. Used by
// the `validate` CLI subcommand and the acceptance test binary.

#pragma once

#include <string>
#include <vector>

namespace adaptsense {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

CriterionResult check_coherence_closed_form();   // 1
CriterionResult check_one_sparse_monte_carlo();  // 2
CriterionResult check_frobenius_identity();      // 3
CriterionResult check_design_solver();           // 4
CriterionResult check_bayes_risk();              // 5
CriterionResult check_figure_trends();           // 6
CriterionResult check_small_m_crossover();       // 7
CriterionResult check_determinism();             // 8

// Runs all criteria (optionally skipping the two long trend-reproduction runs),
// printing one PASS/FAIL line per criterion to stdout.
std::vector<CriterionResult> run_acceptance(bool include_figure_trends = true);

}  // namespace adaptsense
