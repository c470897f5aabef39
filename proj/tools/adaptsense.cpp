// adaptsense command line: experiment runner, coherence tables, validation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "adaptsense/harness.hpp"
#include "adaptsense/validation.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained adaptive sensing simulator"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;
  int trials_override = -1;
  int workers_override = -1;
  bool seed_given = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("--config", config_path, "path to the experiment config")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--seed", seed_override, "override the master seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--trials", trials_override, "override the trial count");
  run->add_option("--workers", workers_override, "override the worker count");

  // coherence
  int coherence_n = 0;
  std::string coherence_out = "out";
  CLI::App* coherence =
      app.add_subcommand("coherence", "emit the coherence table and block-removal curve");
  coherence->add_option("--n", coherence_n, "signal dimension (power of two)")->required();
  coherence->add_option("--out", coherence_out, "output directory (default: out)");

  // validate
  bool quick = false;
  CLI::App* validate =
      app.add_subcommand("validate", "run the closed-form and Monte Carlo acceptance suites");
  validate->add_flag("--quick", quick, "skip the two long trend-reproduction checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      adaptsense::ExperimentConfig cfg = adaptsense::parse_config_json(slurp(config_path));
      if (seed_given) cfg.master_seed = seed_override;
      if (trials_override >= 0) {
        if (trials_override < 1) throw std::invalid_argument("trials must be >= 1");
        cfg.trials = trials_override;
      }
      if (workers_override >= 0) cfg.workers = workers_override;
      adaptsense::run_and_emit(cfg, out_dir);
      std::cout << "wrote outputs to " << out_dir << "\n";
      return 0;
    }
    if (coherence->parsed()) {
      adaptsense::emit_coherence_outputs(coherence_out, coherence_n);
      std::cout << "wrote coherence_table.csv, block_coherence_curve.csv, block_coherence_curve.svg to "
                << coherence_out << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const auto results = adaptsense::run_acceptance(!quick);
      for (const auto& r : results) {
        if (!r.pass) return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
