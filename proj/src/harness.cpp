#include "adaptsense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "adaptsense/analysis.hpp"
#include "json.hpp"

namespace adaptsense {

namespace {

using nlohmann::ordered_json;

constexpr const char* kSeedDoc =
    "stream seed = splitmix64 fold: h = mix64(master); h = mix64(h ^ token) "
    "for tokens [fnv1a64(role), n, m, fnv1a64(strategy-label if any), trial]";

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "mse-vs-m") return ExperimentKind::MseVsM;
  if (name == "mse-vs-n") return ExperimentKind::MseVsN;
  if (name == "ratio-vs-n") return ExperimentKind::RatioVsN;
  if (name == "coherence") return ExperimentKind::Coherence;
  if (name == "one-sparse-validate") return ExperimentKind::OneSparseValidate;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

SupportModel parse_support_model(const std::string& name) {
  if (name == "tree") return SupportModel::Tree;
  if (name == "uniform") return SupportModel::Uniform;
  throw std::invalid_argument("unknown support model: " + name);
}

int resolved_workers(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string csv_escape_free(const std::string& s) { return s; }  // labels carry no commas

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::MseVsM: return "mse-vs-m";
    case ExperimentKind::MseVsN: return "mse-vs-n";
    case ExperimentKind::RatioVsN: return "ratio-vs-n";
    case ExperimentKind::Coherence: return "coherence";
    case ExperimentKind::OneSparseValidate: return "one-sparse-validate";
  }
  return "?";
}

std::string to_string(SupportModel model) {
  return model == SupportModel::Tree ? "tree" : "uniform";
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

ExperimentConfig parse_config_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  static const std::vector<std::string> allowed = {
      "experiment", "n",      "n_sweep",       "m",      "m_sweep",
      "m_rule",     "s",      "sigma2",        "support_model",
      "strategies", "trials", "master_seed",   "workers"};
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw std::invalid_argument("unknown config key: " + item.key());
    }
  }

  ExperimentConfig cfg;
  if (!j.contains("experiment")) throw std::invalid_argument("config missing 'experiment'");
  cfg.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());

  if (j.contains("n")) cfg.n_values = {j.at("n").get<int>()};
  if (j.contains("n_sweep")) {
    if (!cfg.n_values.empty()) throw std::invalid_argument("give either 'n' or 'n_sweep'");
    cfg.n_values = j.at("n_sweep").get<std::vector<int>>();
  }
  if (j.contains("m")) cfg.m_fixed = j.at("m").get<int>();
  if (j.contains("m_sweep")) cfg.m_values = j.at("m_sweep").get<std::vector<int>>();
  if (j.contains("m_rule")) cfg.m_rule = j.at("m_rule").get<double>();
  if (j.contains("s")) cfg.s = j.at("s").get<int>();
  if (j.contains("sigma2")) cfg.sigma2 = j.at("sigma2").get<double>();
  if (j.contains("support_model")) {
    cfg.support_model = parse_support_model(j.at("support_model").get<std::string>());
  }
  if (j.contains("strategies")) {
    for (const auto& sj : j.at("strategies")) {
      if (!sj.is_object()) throw std::invalid_argument("strategy entries must be objects");
      for (const auto& item : sj.items()) {
        if (item.key() != "kind" && item.key() != "recovery") {
          throw std::invalid_argument("unknown strategy key: " + item.key());
        }
      }
      StrategySpec spec;
      spec.kind = parse_strategy_kind(sj.at("kind").get<std::string>());
      if (sj.contains("recovery")) spec.recovery = parse_recovery_alg(sj.at("recovery").get<std::string>());
      cfg.strategies.push_back(spec);
    }
  }
  bool trials_given = false;
  if (j.contains("trials")) {
    cfg.trials = j.at("trials").get<int>();
    trials_given = true;
  }
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();

  // validation
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.s < 1) throw std::invalid_argument("s must be >= 1");
  if (cfg.sigma2 < 0.0) throw std::invalid_argument("sigma2 must be >= 0");
  if (cfg.workers < 0) throw std::invalid_argument("workers must be >= 0");
  for (int n : cfg.n_values) {
    if (!is_power_of_two(n)) throw std::invalid_argument("n must be a power of two");
    if (cfg.s > n) throw std::invalid_argument("s must be <= n");
  }

  const bool trial_experiment = cfg.experiment == ExperimentKind::MseVsM ||
                                cfg.experiment == ExperimentKind::MseVsN ||
                                cfg.experiment == ExperimentKind::RatioVsN;
  switch (cfg.experiment) {
    case ExperimentKind::MseVsM:
      if (cfg.n_values.size() != 1) throw std::invalid_argument("mse-vs-m needs a single 'n'");
      if (cfg.m_values.empty()) throw std::invalid_argument("mse-vs-m needs 'm_sweep'");
      if (cfg.m_fixed || cfg.m_rule) throw std::invalid_argument("mse-vs-m takes only 'm_sweep'");
      break;
    case ExperimentKind::MseVsN:
    case ExperimentKind::RatioVsN:
      if (cfg.n_values.empty()) throw std::invalid_argument("n sweep experiments need 'n_sweep'");
      if (!cfg.m_rule && !cfg.m_fixed) throw std::invalid_argument("n sweep experiments need 'm' or 'm_rule'");
      if (cfg.m_rule && cfg.m_fixed) throw std::invalid_argument("give either 'm' or 'm_rule'");
      if (!cfg.m_values.empty()) throw std::invalid_argument("'m_sweep' is only for mse-vs-m");
      break;
    case ExperimentKind::Coherence:
      if (cfg.n_values.size() != 1) throw std::invalid_argument("coherence needs a single 'n'");
      if (cfg.m_fixed || cfg.m_rule || !cfg.m_values.empty()) {
        throw std::invalid_argument("coherence takes no measurement budget");
      }
      break;
    case ExperimentKind::OneSparseValidate:
      if (cfg.n_values.size() != 1) throw std::invalid_argument("one-sparse-validate needs a single 'n'");
      if (!cfg.m_fixed) throw std::invalid_argument("one-sparse-validate needs 'm'");
      if (cfg.m_rule || !cfg.m_values.empty()) throw std::invalid_argument("one-sparse-validate takes only 'm'");
      if (*cfg.m_fixed % 2 != 0) throw std::invalid_argument("one-sparse-validate needs even 'm'");
      if (!trials_given) cfg.trials = 100000;  // noise draws
      break;
  }
  if (trial_experiment && cfg.strategies.empty()) {
    throw std::invalid_argument("trial experiments need a nonempty 'strategies' list");
  }
  if (trial_experiment) {
    bool has_adaptive = false;
    for (const auto& sp : cfg.strategies) {
      if (sp.kind == StrategyKind::AdaptiveUniform || sp.kind == StrategyKind::AdaptiveVds) {
        has_adaptive = true;
      }
    }
    for (const SweepPoint& pt : resolve_sweep(cfg)) {
      if (pt.m < 1) throw std::invalid_argument("sweep produced m < 1");
      if (cfg.m_rule && pt.m < 2) throw std::invalid_argument("m_rule produced m < 2");
      if (has_adaptive && pt.m < 2) throw std::invalid_argument("adaptive strategies need m >= 2");
      if (pt.m < cfg.s) throw std::invalid_argument("sweep produced m < s");
    }
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  if (cfg.n_values.size() == 1) {
    j["n"] = cfg.n_values[0];
  } else {
    j["n_sweep"] = cfg.n_values;
  }
  if (cfg.m_fixed) j["m"] = *cfg.m_fixed;
  if (!cfg.m_values.empty()) j["m_sweep"] = cfg.m_values;
  if (cfg.m_rule) j["m_rule"] = *cfg.m_rule;
  j["s"] = cfg.s;
  j["sigma2"] = cfg.sigma2;
  j["support_model"] = to_string(cfg.support_model);
  ordered_json strategies = ordered_json::array();
  for (const auto& sp : cfg.strategies) {
    ordered_json sj;
    sj["kind"] = to_string(sp.kind);
    sj["recovery"] = to_string(sp.recovery);
    strategies.push_back(sj);
  }
  j["strategies"] = strategies;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["workers"] = cfg.workers;
  return j.dump(2);
}

std::vector<SweepPoint> resolve_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  switch (cfg.experiment) {
    case ExperimentKind::MseVsM:
      for (int m : cfg.m_values) points.push_back({cfg.n_values[0], m});
      break;
    case ExperimentKind::MseVsN:
    case ExperimentKind::RatioVsN:
      for (int n : cfg.n_values) {
        int m = cfg.m_fixed ? *cfg.m_fixed
                            : static_cast<int>(std::llround(*cfg.m_rule * n));
        points.push_back({n, m});
      }
      break;
    case ExperimentKind::Coherence:
    case ExperimentKind::OneSparseValidate:
      points.push_back({cfg.n_values[0], cfg.m_fixed ? *cfg.m_fixed : 0});
      break;
  }
  return points;
}

std::uint64_t signal_seed(std::uint64_t master, const SweepPoint& pt, int trial) {
  return SeedChain(master)
      .with("signal")
      .with(static_cast<std::uint64_t>(pt.n))
      .with(static_cast<std::uint64_t>(pt.m))
      .with(static_cast<std::uint64_t>(trial))
      .seed();
}

std::uint64_t strategy_seed(std::uint64_t master, const SweepPoint& pt,
                            const std::string& label, int trial) {
  return SeedChain(master)
      .with("strategy")
      .with(static_cast<std::uint64_t>(pt.n))
      .with(static_cast<std::uint64_t>(pt.m))
      .with(label)
      .with(static_cast<std::uint64_t>(trial))
      .seed();
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  const std::vector<SweepPoint> points = resolve_sweep(cfg);
  const int n_strategies = static_cast<int>(cfg.strategies.size());
  std::vector<TrialRecord> records(points.size() * cfg.trials * n_strategies);

  std::map<int, SensingContext> contexts;
  for (const SweepPoint& pt : points) {
    if (!contexts.count(pt.n)) contexts.emplace(pt.n, make_context(pt.n));
  }

  const int workers = std::min(resolved_workers(cfg), cfg.trials);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const SweepPoint pt = points[p];
    const SensingContext& ctx = contexts.at(pt.n);

    std::atomic<int> next_trial{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
      for (;;) {
        const int t = next_trial.fetch_add(1);
        if (t >= cfg.trials) return;
        try {
          RandomStream sig_rng(signal_seed(cfg.master_seed, pt, t));
          std::vector<int> support =
              cfg.support_model == SupportModel::Tree
                  ? sample_tree_support(pt.n, cfg.s, sig_rng)
                  : sample_uniform_support(pt.n, cfg.s, sig_rng);
          const Eigen::VectorXd alpha = draw_coefficients(support, pt.n, sig_rng);
          const SparseSignal signal = make_haar_signal(*ctx.haar, std::move(support), alpha);

          for (int k = 0; k < n_strategies; ++k) {
            StrategyConfig scfg;
            scfg.kind = cfg.strategies[k].kind;
            scfg.recovery = cfg.strategies[k].recovery;
            scfg.m = pt.m;
            scfg.s = cfg.s;
            scfg.sigma2 = cfg.sigma2;
            const std::string label = strategy_label(scfg);
            const std::uint64_t seed = strategy_seed(cfg.master_seed, pt, label, t);
            RandomStream rng(seed);
            const SensingOutcome outcome = run_strategy(ctx, signal, scfg, rng);
            TrialRecord rec;
            rec.strategy = label;
            rec.n = pt.n;
            rec.m = pt.m;
            rec.s = cfg.s;
            rec.seed = seed;
            rec.sq_error = outcome.sq_error;
            rec.support_correct = outcome.support_correct;
            records[(p * cfg.trials + t) * n_strategies + k] = std::move(rec);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };

    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
  }
  return records;
}

std::vector<SummaryRow> median_aggregate(const std::vector<TrialRecord>& records,
                                         const ExperimentConfig& cfg) {
  const std::vector<SweepPoint> points = resolve_sweep(cfg);
  std::vector<SummaryRow> summary;
  for (const SweepPoint& pt : points) {
    for (const auto& sp : cfg.strategies) {
      StrategyConfig scfg;
      scfg.kind = sp.kind;
      scfg.recovery = sp.recovery;
      const std::string label = strategy_label(scfg);
      std::vector<double> errors;
      for (const TrialRecord& rec : records) {
        if (rec.n == pt.n && rec.m == pt.m && rec.strategy == label) {
          errors.push_back(rec.sq_error);
        }
      }
      if (errors.empty()) {
        std::cerr << "warning: empty trial group for " << label << " at n=" << pt.n
                  << " m=" << pt.m << ", omitted\n";
        continue;
      }
      std::sort(errors.begin(), errors.end());
      const std::size_t k = errors.size();
      const double median = (k % 2 == 1)
                                ? errors[k / 2]
                                : 0.5 * (errors[k / 2 - 1] + errors[k / 2]);
      SummaryRow row;
      row.strategy = label;
      row.n = pt.n;
      row.m = pt.m;
      row.s = cfg.s;
      row.sigma2 = cfg.sigma2;
      row.median_sq_error = median;
      row.trials = static_cast<int>(k);
      summary.push_back(row);
    }
  }
  return summary;
}

namespace {

// ---- minimal SVG line plots (log-scaled error axis) ----

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  bool dashed = false;
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_plot_svg(const std::string& title, const std::string& xlabel,
                            const std::string& ylabel,
                            const std::vector<PlotSeries>& series, bool log_x) {
  const double width = 760, height = 500;
  const double ml = 80, mr = 200, mt = 50, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (v > 0.0) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  if (ymin > ymax) {
    ymin = 1e-12;
    ymax = 1.0;
  }
  if (xmin > xmax) {
    xmin = 0.0;
    xmax = 1.0;
  }
  const double ylo = std::floor(std::log10(ymin)) - 0.0;
  const double yhi = std::ceil(std::log10(ymax)) + 0.0;
  const double xlo = log_x ? std::log2(xmin) : xmin;
  const double xhi = log_x ? std::log2(xmax) : xmax;
  const double xspan = (xhi > xlo) ? xhi - xlo : 1.0;
  const double yspan = (yhi > ylo) ? yhi - ylo : 1.0;

  auto map_x = [&](double v) {
    const double t = ((log_x ? std::log2(v) : v) - xlo) / xspan;
    return ml + t * pw;
  };
  auto map_y = [&](double v) {
    const double lv = std::log10(std::max(v, std::pow(10.0, ylo - 1)));
    const double t = (lv - ylo) / yspan;
    return mt + (1.0 - t) * ph;
  };

  static const char* palette[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt2(width / 2) << "\" y=\"25\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title) << "</text>\n";

  // decade gridlines and y tick labels
  for (int d = static_cast<int>(ylo); d <= static_cast<int>(yhi); ++d) {
    const double y = map_y(std::pow(10.0, d));
    svg << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(y) << "\" x2=\""
        << fmt2(ml + pw) << "\" y2=\"" << fmt2(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt2(ml - 8) << "\" y=\"" << fmt2(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e"
        << d << "</text>\n";
  }
  // x ticks at the data points of the first series
  if (!series.empty()) {
    for (double v : series[0].x) {
      const double x = map_x(v);
      svg << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(mt + ph) << "\" x2=\""
          << fmt2(x) << "\" y2=\"" << fmt2(mt + ph + 5)
          << "\" stroke=\"#333333\"/>\n";
      svg << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(mt + ph + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << static_cast<long long>(std::llround(v)) << "</text>\n";
    }
  }
  svg << "<rect x=\"" << fmt2(ml) << "\" y=\"" << fmt2(mt) << "\" width=\""
      << fmt2(pw) << "\" height=\"" << fmt2(ph)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << fmt2(ml + pw / 2) << "\" y=\"" << fmt2(height - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(xlabel) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << fmt2(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 20 " << fmt2(mt + ph / 2) << ")\">" << xml_escape(ylabel)
      << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % 8];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) svg << " ";
      svg << fmt2(map_x(s.x[i])) << "," << fmt2(map_y(s.y[i]));
    }
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << "<circle cx=\"" << fmt2(map_x(s.x[i])) << "\" cy=\""
          << fmt2(map_y(s.y[i])) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = mt + 16 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << fmt2(ml + pw + 10) << "\" y1=\"" << fmt2(ly)
        << "\" x2=\"" << fmt2(ml + pw + 34) << "\" y2=\"" << fmt2(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << "/>\n";
    svg << "<text x=\"" << fmt2(ml + pw + 40) << "\" y=\"" << fmt2(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string summary_csv(const std::vector<SummaryRow>& summary,
                        const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment,strategy,n,m,s,sigma2,median_sq_error,trials,master_seed\n";
  for (const SummaryRow& row : summary) {
    out << to_string(cfg.experiment) << "," << csv_escape_free(row.strategy) << ","
        << row.n << "," << row.m << "," << row.s << "," << format_double(row.sigma2)
        << "," << format_double(row.median_sq_error) << "," << row.trials << ","
        << cfg.master_seed << "\n";
  }
  return out.str();
}

const SummaryRow* find_row(const std::vector<SummaryRow>& summary,
                           const std::string& strategy, int n, int m) {
  for (const SummaryRow& row : summary) {
    if (row.strategy == strategy && row.n == n && row.m == m) return &row;
  }
  return nullptr;
}

struct RatioRow {
  std::string pair;
  int n = 0, m = 0;
  double ratio = 0.0;
};

// nonadaptive/adaptive ratios for matched sampling and recovery, plus the
// nonadaptive-uniform/oracle ratio when both strategies are present.
std::vector<RatioRow> ratio_rows(const std::vector<SummaryRow>& summary,
                                 const ExperimentConfig& cfg) {
  std::vector<RatioRow> rows;
  for (const SweepPoint& pt : resolve_sweep(cfg)) {
    for (const auto& sp : cfg.strategies) {
      std::string adaptive_label, nonadaptive_label;
      if (sp.kind == StrategyKind::AdaptiveUniform) {
        nonadaptive_label = "nonadaptive-uniform+" + to_string(sp.recovery);
        adaptive_label = "adaptive-uniform+" + to_string(sp.recovery);
      } else if (sp.kind == StrategyKind::AdaptiveVds) {
        nonadaptive_label = "nonadaptive-vds+" + to_string(sp.recovery);
        adaptive_label = "adaptive-vds+" + to_string(sp.recovery);
      } else if (sp.kind == StrategyKind::Oracle) {
        for (const char* base : {"nonadaptive-uniform", "nonadaptive-vds"}) {
          for (const char* rec : {"cosamp", "l1"}) {
            const std::string non = std::string(base) + "+" + rec;
            const SummaryRow* num = find_row(summary, non, pt.n, pt.m);
            const SummaryRow* den = find_row(summary, "oracle", pt.n, pt.m);
            if (num && den && den->median_sq_error > 0.0) {
              rows.push_back({non + "/oracle", pt.n, pt.m,
                              num->median_sq_error / den->median_sq_error});
            }
          }
        }
        continue;
      } else {
        continue;
      }
      const SummaryRow* num = find_row(summary, nonadaptive_label, pt.n, pt.m);
      const SummaryRow* den = find_row(summary, adaptive_label, pt.n, pt.m);
      if (num && den && den->median_sq_error > 0.0) {
        rows.push_back({nonadaptive_label + "/" + adaptive_label, pt.n, pt.m,
                        num->median_sq_error / den->median_sq_error});
      }
    }
  }
  return rows;
}

std::string ratio_csv(const std::vector<RatioRow>& rows, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment,pair,n,m,s,sigma2,ratio,log_n,n_over_s,trials,master_seed\n";
  for (const RatioRow& row : rows) {
    out << to_string(cfg.experiment) << "," << row.pair << "," << row.n << ","
        << row.m << "," << cfg.s << "," << format_double(cfg.sigma2) << ","
        << format_double(row.ratio) << ","
        << format_double(std::log(static_cast<double>(row.n))) << ","
        << format_double(static_cast<double>(row.n) / cfg.s) << "," << cfg.trials
        << "," << cfg.master_seed << "\n";
  }
  return out.str();
}

void emit_manifest(const std::filesystem::path& outdir, const ExperimentConfig& cfg,
                   const std::vector<std::string>& outputs) {
  ordered_json j;
  j["tool"] = "adaptsense";
  j["config"] = ordered_json::parse(config_to_json(cfg));
  j["seed_derivation"] = kSeedDoc;
  j["outputs"] = outputs;
  atomic_write(outdir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace

void emit_outputs(const std::filesystem::path& outdir,
                  const std::vector<SummaryRow>& summary,
                  const ExperimentConfig& cfg) {
  if (summary.empty()) throw std::invalid_argument("emit_outputs: empty summary");
  std::vector<std::string> outputs;

  atomic_write(outdir / "summary.csv", summary_csv(summary, cfg));
  outputs.push_back("summary.csv");

  // median-error plot: series per strategy over the sweep variable
  const bool sweep_n = cfg.experiment == ExperimentKind::MseVsN ||
                       cfg.experiment == ExperimentKind::RatioVsN;
  std::vector<PlotSeries> series;
  for (const auto& sp : cfg.strategies) {
    StrategyConfig scfg;
    scfg.kind = sp.kind;
    scfg.recovery = sp.recovery;
    const std::string label = strategy_label(scfg);
    PlotSeries s;
    s.name = label;
    for (const SummaryRow& row : summary) {
      if (row.strategy == label) {
        s.x.push_back(sweep_n ? row.n : row.m);
        s.y.push_back(row.median_sq_error);
      }
    }
    if (!s.x.empty()) series.push_back(std::move(s));
  }
  const std::string plot_name =
      "plot_" + std::string(sweep_n ? "mse_vs_n" : "mse_vs_m") + ".svg";
  atomic_write(outdir / plot_name,
               render_plot_svg("median squared error (" + to_string(cfg.support_model) +
                                   " supports)",
                               sweep_n ? "n" : "m", "median squared error", series,
                               sweep_n));
  outputs.push_back(plot_name);

  if (cfg.experiment == ExperimentKind::RatioVsN) {
    const std::vector<RatioRow> rows = ratio_rows(summary, cfg);
    atomic_write(outdir / "ratio.csv", ratio_csv(rows, cfg));
    outputs.push_back("ratio.csv");

    std::vector<PlotSeries> rseries;
    std::vector<std::string> pair_names;
    for (const RatioRow& row : rows) {
      if (std::find(pair_names.begin(), pair_names.end(), row.pair) == pair_names.end()) {
        pair_names.push_back(row.pair);
      }
    }
    for (const std::string& pair : pair_names) {
      PlotSeries s;
      s.name = pair;
      for (const RatioRow& row : rows) {
        if (row.pair == pair) {
          s.x.push_back(row.n);
          s.y.push_back(row.ratio);
        }
      }
      rseries.push_back(std::move(s));
    }
    PlotSeries log_ref, ns_ref;
    log_ref.name = "log n";
    log_ref.dashed = true;
    ns_ref.name = "n/s";
    ns_ref.dashed = true;
    for (const SweepPoint& pt : resolve_sweep(cfg)) {
      log_ref.x.push_back(pt.n);
      log_ref.y.push_back(std::log(static_cast<double>(pt.n)));
      ns_ref.x.push_back(pt.n);
      ns_ref.y.push_back(static_cast<double>(pt.n) / cfg.s);
    }
    rseries.push_back(std::move(log_ref));
    rseries.push_back(std::move(ns_ref));
    atomic_write(outdir / "plot_ratio_vs_n.svg",
                 render_plot_svg("nonadaptive / adaptive median error ratio", "n",
                                 "ratio", rseries, true));
    outputs.push_back("plot_ratio_vs_n.svg");
  }

  emit_manifest(outdir, cfg, outputs);
}

void emit_coherence_outputs(const std::filesystem::path& outdir, int n) {
  const CoherenceTable table = CoherenceTable::closed_form(n);
  std::ostringstream tcsv;
  tcsv << "n,j,lambda,value\n";
  for (int j = 0; j < n; ++j) {
    for (int lam = 0; lam < n; ++lam) {
      tcsv << n << "," << j << "," << lam << "," << format_double(table.values(j, lam))
           << "\n";
    }
  }
  atomic_write(outdir / "coherence_table.csv", tcsv.str());

  // Figure-6 style curve: top-down block removal, one row per step
  std::ostringstream fcsv;
  fcsv << "n,excluded_blocks,value\n";
  const int levels = log2_exact(n);
  std::set<int> excluded;
  fcsv << n << "," << "" << "," << format_double(block_restricted_max(n, excluded)) << "\n";
  std::string removed;
  for (int a = levels; a >= 2; --a) {
    excluded.insert(a);
    if (!removed.empty()) removed += ";";
    removed += std::to_string(a);
    fcsv << n << "," << removed << "," << format_double(block_restricted_max(n, excluded))
         << "\n";
  }
  atomic_write(outdir / "block_coherence_curve.csv", fcsv.str());

  PlotSeries s;
  s.name = "max coherence over remaining supports";
  const auto curve = block_restricted_curve(n);
  for (const auto& point : curve) {
    s.x.push_back(point.removed_blocks);
    s.y.push_back(point.value);
  }
  atomic_write(outdir / "block_coherence_curve.svg",
               render_plot_svg("block-restricted max coherence, n=" + std::to_string(n),
                               "removed blocks (top-down)", "max coherence", {s},
                               false));
}

void emit_one_sparse_outputs(const std::filesystem::path& outdir,
                             const ExperimentConfig& cfg) {
  const int n = cfg.n_values[0];
  const int m = *cfg.m_fixed;
  const double sigma2 = cfg.sigma2;
  const int draws = cfg.trials;
  const int levels = log2_exact(n);

  std::vector<int> lambdas = {0};
  for (int a = levels; a >= 1; --a) lambdas.push_back(n >> a);  // first index per block

  std::ostringstream csv;
  csv << "n,m,sigma2,mode,lambda,block,best_j,formula_mse,mc_mse,rel_error,draws,"
         "master_seed\n";
  for (int lam : lambdas) {
    const int j = best_row_for_support(n, lam);
    const double c = coherence_closed_form(n, j, lam);
    for (int mode = 0; mode < 2; ++mode) {
      const bool adaptive = (mode == 1);
      const int reps = adaptive ? m / 2 : m;
      const double formula = adaptive ? one_sparse_mse_adaptive(n, m, j, lam, sigma2)
                                      : one_sparse_mse(n, m, j, lam, sigma2);
      RandomStream rng(SeedChain(cfg.master_seed)
                           .with("one-sparse")
                           .with(static_cast<std::uint64_t>(lam))
                           .with(static_cast<std::uint64_t>(mode))
                           .seed());
      double acc = 0.0;
      for (int d = 0; d < draws; ++d) {
        std::complex<double> noise_sum = 0.0;
        for (int r = 0; r < reps; ++r) noise_sum += rng.complex_gaussian(sigma2);
        const std::complex<double> err = noise_sum / (static_cast<double>(reps) * c);
        acc += std::norm(err);
      }
      const double mc = acc / draws;
      const int block = (lam == 0) ? 0 : levels - static_cast<int>(std::floor(std::log2(lam)));
      csv << n << "," << m << "," << format_double(sigma2) << ","
          << (adaptive ? "adaptive" : "oracle") << "," << lam << "," << block << ","
          << j << "," << format_double(formula) << "," << format_double(mc) << ","
          << format_double(std::abs(mc - formula) / formula) << "," << draws << ","
          << cfg.master_seed << "\n";
    }
  }
  atomic_write(outdir / "one_sparse_validation.csv", csv.str());
}

void run_and_emit(const ExperimentConfig& cfg, const std::filesystem::path& outdir) {
  switch (cfg.experiment) {
    case ExperimentKind::Coherence: {
      emit_coherence_outputs(outdir, cfg.n_values[0]);
      emit_manifest(outdir, cfg, {"coherence_table.csv", "block_coherence_curve.csv", "block_coherence_curve.svg"});
      return;
    }
    case ExperimentKind::OneSparseValidate: {
      emit_one_sparse_outputs(outdir, cfg);
      emit_manifest(outdir, cfg, {"one_sparse_validation.csv"});
      return;
    }
    default: {
      const std::vector<TrialRecord> records = run_experiment(cfg);
      const std::vector<SummaryRow> summary = median_aggregate(records, cfg);
      emit_outputs(outdir, summary, cfg);
      return;
    }
  }
}

}  // namespace adaptsense
