#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsing/criteria.hpp"
#include "qsing/experiment.hpp"

namespace {

using namespace qsing;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::vector<double> parse_theta_csv(const std::string& text) {
  std::vector<double> theta;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) theta.push_back(std::stod(item));
  return theta;
}

json matrix_json(const std::vector<double>& m, int d) {
  json rows = json::array();
  for (int i = 0; i < d; ++i) {
    json row = json::array();
    for (int j = 0; j < d; ++j) row.push_back(m[i * d + j]);
    rows.push_back(row);
  }
  return rows;
}

json reference_json(const ReferenceConstants& ref) {
  json out = json::object();
  auto put = [&](const char* name, const std::optional<ReferenceEntry>& entry) {
    if (entry) out[name] = {{"value", entry->value}, {"source", entry->source}};
  };
  put("lambda", ref.lambda);
  put("nu", ref.nu);
  put("r_cq", ref.r_cq);
  put("multiplicity", ref.multiplicity);
  put("lambda_q", ref.lambda_q);
  put("nu_q", ref.nu_q);
  put("nu_prime_q", ref.nu_prime_q);
  put("j", ref.j);
  put("j_q", ref.j_q);
  put("trace_ratio", ref.trace_ratio);
  return out;
}

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("QSING_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // auto
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!out_dir.empty()) config.output_dir = out_dir;
  try {
    const auto [records, aggregates] = run_experiment(config, resolve_threads(threads));
    write_outputs(records, aggregates, config, config.output_dir);
    std::cout << "model " << config.model_id << ", " << records.size() << " runs -> "
              << config.output_dir << "\n";
    std::cout << "n";
    for (const std::string& metric : kAggregateMetrics) std::cout << "  " << metric;
    std::cout << "\n";
    for (const AggregateRow& row : aggregates) {
      std::cout << row.n;
      for (const auto& [name, stats] : row.metrics) std::cout << "  " << stats.mean;
      std::cout << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_theory(const std::string& model_id, const std::string& theta_csv) {
  ParametricModel model = [&] { return make_model(model_id); }();
  std::vector<double> theta = theta_csv.empty() ? model.theta0() : parse_theta_csv(theta_csv);

  json out;
  out["model"] = model.id();
  out["theta"] = theta;

  const PauliShadowScheme scheme(model.hilbert_dim() == 2 ? 1 : (model.hilbert_dim() == 4 ? 2 : 3));
  FisherReport report =
      numerical_hessians(model, model.true_state(), scheme.povm(), theta);
  out["fisher"] = {{"I", matrix_json(report.I, report.d)},
                   {"J", matrix_json(report.J, report.d)},
                   {"I_q", matrix_json(report.I_q, report.d)},
                   {"J_q", matrix_json(report.J_q, report.d)}};
  try {
    fill_regular_coefficients(report);
    out["coefficients"] = {{"lambda_q", *report.lambda_q},
                           {"nu_q", *report.nu_q},
                           {"nu_prime_q", *report.nu_prime_q}};
  } catch (const SingularHessian&) {
    out["coefficients"] = nullptr;
    out["note"] = "J is singular at theta; regular-case coefficients are not defined";
  }

  const ReferenceConstants ref = reference(model.id());
  out["reference"] = reference_json(ref);

  json discrepancy = json::object();
  auto flag = [&](const char* name, const std::optional<ReferenceEntry>& entry,
                  const std::optional<double>& computed) {
    if (entry && computed)
      discrepancy[name] = std::abs(entry->value - *computed) > 0.05 * std::abs(entry->value);
  };
  flag("lambda_q", ref.lambda_q, report.lambda_q);
  flag("nu_q", ref.nu_q, report.nu_q);
  flag("nu_prime_q", ref.nu_prime_q, report.nu_prime_q);
  if (ref.j) flag("j", ref.j, std::optional<double>(report.J[0]));
  if (ref.j_q) flag("j_q", ref.j_q, std::optional<double>(report.J_q[0]));
  out["discrepancy"] = discrepancy;

  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_models() {
  for (const std::string& id : model_ids()) {
    const ParametricModel model = make_model(id);
    std::cout << id << "  d=" << model.dim_param() << "  hilbert_dim=" << model.hilbert_dim()
              << "  theta0=[";
    for (std::size_t j = 0; j < model.theta0().size(); ++j)
      std::cout << (j ? "," : "") << model.theta0()[j];
    std::cout << "]\n";
  }
  return kExitOk;
}

int cmd_check_shadows(int states, bool corrupt_table) {
  const PauliShadowScheme scheme(1);
  std::vector<HermitianMatrix> table;
  for (std::size_t m = 0; m < scheme.n_outcomes(); ++m) table.push_back(scheme.snapshot(m).mat);
  if (corrupt_table) {
    ComplexMatrix bad = table[0].mat();
    bad(0, 0) += 1e-6;
    bad(1, 1) -= 1e-6;  // keep the trace so only unbiasedness breaks
    table[0] = HermitianMatrix(std::move(bad));
  }

  Rng rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < states; ++trial) {
    ComplexMatrix g(2);
    for (auto& z : g.entries()) z = cxd(rng.gaussian(), rng.gaussian());
    ComplexMatrix ggd = g * dagger(g);
    const DensityMatrix rho(HermitianMatrix(cxd(1.0 / trace(ggd).real(), 0.0) * ggd));
    const std::vector<double> p = born_probabilities(rho, scheme.povm());
    ComplexMatrix acc(2);
    for (std::size_t m = 0; m < scheme.n_outcomes(); ++m)
      acc = acc + cxd(p[m], 0.0) * table[m].mat();
    worst = std::max(worst, max_abs(acc - rho.mat().mat()));
  }
  std::cout << "states checked: " << states << "\n";
  std::cout << "max entrywise error: " << worst << "\n";
  if (worst <= 1e-12) {
    std::cout << "max error < 1e-12\n";
    return kExitOk;
  }
  std::cerr << "error: snapshot reconstruction is biased\n";
  return kExitRuntime;
}

int cmd_plot_data(const std::string& in_path, const std::string& metric,
                  const std::string& out_path, const std::vector<std::string>& overlay) {
  double overlay_value = 0.0;
  bool have_overlay = false;
  if (!overlay.empty()) {
    if (overlay.size() != 2 || overlay[0] != "c_over_n") {
      std::cerr << "error: --overlay expects: c_over_n VALUE\n";
      return kExitUsage;
    }
    try {
      overlay_value = std::stod(overlay[1]);
    } catch (const std::exception&) {
      std::cerr << "error: --overlay value \"" << overlay[1] << "\" is not a number\n";
      return kExitUsage;
    }
    have_overlay = true;
  }

  std::vector<RunRecord> records;
  try {
    records = read_runs_csv(in_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (records.empty()) {
    std::cerr << "error: no data rows in " << in_path << "\n";
    return kExitUsage;
  }

  auto value_of = [&](const RunRecord& r) -> double {
    if (metric == "g_n_q") return r.criteria.g_n_q;
    if (metric == "t_n_q") return r.criteria.t_n_q;
    if (metric == "c_n_q") return r.criteria.c_n_q;
    if (metric == "qwaic") return r.criteria.qwaic;
    if (metric == "g_n") return r.criteria.g_n;
    if (metric == "t_n") return r.criteria.t_n;
    if (metric == "waic") return r.criteria.waic;
    if (metric == "acceptance_rate") return r.acceptance_rate;
    if (metric == "wall_time_ms") return r.wall_time_ms;
    if (metric == "qwaic_gap") return r.criteria.g_n_q - r.criteria.qwaic;
    throw ValidationError("unknown metric \"" + metric + "\"");
  };

  std::vector<std::size_t> ns;
  for (const RunRecord& r : records)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return kExitRuntime;
    }
    out = &file;
  }

  try {
    *out << "# n mean stderr" << (have_overlay ? " overlay" : "") << "\n";
    for (std::size_t n : ns) {
      std::vector<double> values;
      for (const RunRecord& r : records)
        if (r.n == n) values.push_back(value_of(r));
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double sd = 0.0;
      if (values.size() > 1) {
        for (double v : values) sd += (v - mean) * (v - mean);
        sd = std::sqrt(sd / static_cast<double>(values.size() - 1));
      }
      const double se = sd / std::sqrt(static_cast<double>(values.size()));
      *out << n << ' ' << mean << ' ' << se;
      if (have_overlay) *out << ' ' << overlay_value / static_cast<double>(n);
      *out << "\n";
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian quantum state estimation experiments (QWAIC and friends)"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  CLI::App* run = app.add_subcommand("run", "Run a full experiment from a config file");
  run->add_option("--config", config_path, "Experiment config file (key/value or JSON)")
      ->required();
  run->add_option("--out", out_dir, "Output directory (overrides config output_dir)");
  run->add_option("--threads", threads, "Worker threads (default: QSING_THREADS or all cores)");

  std::string model_id, theta_csv;
  CLI::App* theory = app.add_subcommand("theory", "Fisher matrices, coefficients and reference "
                                                  "constants for a model");
  theory->add_option("--model", model_id, "Model id")->required();
  theory->add_option("--theta", theta_csv, "Evaluation point (comma-separated; default theta0)");

  app.add_subcommand("models", "List registered models");

  int states = 20;
  bool corrupt_table = false;
  CLI::App* check = app.add_subcommand("check-shadows",
                                       "Exact-enumeration unbiasedness check of the snapshots");
  check->add_option("--states", states, "Number of random states (default 20)")
      ->check(CLI::PositiveNumber);
  check->add_flag("--corrupt-table", corrupt_table, "Negative control (test hook)");

  std::string in_path, metric, plot_out;
  std::vector<std::string> overlay;
  CLI::App* plot = app.add_subcommand("plot-data", "Aggregate runs.csv into (n, mean, stderr)");
  plot->add_option("--in", in_path, "runs.csv produced by the run subcommand")->required();
  plot->add_option("--metric", metric, "Column to aggregate (or qwaic_gap)")->required();
  plot->add_option("--out", plot_out, "Output file (default stdout)");
  plot->add_option("--overlay", overlay, "Reference curve: c_over_n VALUE")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path, out_dir, threads);
    if (app.got_subcommand(theory)) return cmd_theory(model_id, theta_csv);
    if (app.got_subcommand("models")) return cmd_models();
    if (app.got_subcommand(check)) return cmd_check_shadows(states, corrupt_table);
    if (app.got_subcommand(plot)) return cmd_plot_data(in_path, metric, plot_out, overlay);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
