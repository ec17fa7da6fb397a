#include "qsing/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qsing {

const std::vector<std::string> kAggregateMetrics = {
    "g_n_q", "t_n_q", "c_n_q", "qwaic", "g_n", "t_n", "waic", "acceptance_rate"};

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double metric_value(const RunRecord& r, const std::string& name) {
  if (name == "g_n_q") return r.criteria.g_n_q;
  if (name == "t_n_q") return r.criteria.t_n_q;
  if (name == "c_n_q") return r.criteria.c_n_q;
  if (name == "qwaic") return r.criteria.qwaic;
  if (name == "g_n") return r.criteria.g_n;
  if (name == "t_n") return r.criteria.t_n;
  if (name == "waic") return r.criteria.waic;
  if (name == "acceptance_rate") return r.acceptance_rate;
  if (name == "wall_time_ms") return r.wall_time_ms;
  throw ValidationError("unknown metric \"" + name + "\"");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int qubits_for_dim(int hilbert_dim) {
  int n = 0, d = 1;
  while (d < hilbert_dim) {
    d *= 2;
    ++n;
  }
  if (d != hilbert_dim)
    throw ValidationError("hilbert dimension " + std::to_string(hilbert_dim) +
                          " is not a power of 2");
  return n;
}

DensityMatrix resolve_true_state(const ExperimentConfig& config, const ParametricModel& model) {
  if (config.rho_true_mat) return DensityMatrix(HermitianMatrix(*config.rho_true_mat));
  if (!config.theta_true.empty()) return model.sigma(config.theta_true);
  return model.true_state();
}

RunRecord run_one(const ExperimentConfig& config, const ParametricModel& model,
                  const PauliShadowScheme& scheme, const DensityMatrix& rho_true, std::size_t n,
                  std::size_t rep) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.model_id = config.model_id;
  record.n = n;
  record.rep = rep;
  record.seed = derive_child_seed(config.master_seed, n, rep);

  Rng rng(record.seed);
  const std::vector<std::size_t> outcomes = sample_outcomes(rho_true, scheme, n, rng);
  const PosteriorSamples samples = run_mh(model, outcomes, scheme.povm(), config.mh, rng);
  record.criteria = compute_criteria(model, samples, outcomes, scheme, rho_true);
  record.acceptance_rate = samples.acceptance_rate;
  record.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace

std::uint64_t derive_child_seed(std::uint64_t master_seed, std::uint64_t n, std::uint64_t rep) {
  std::uint64_t h = mix64(master_seed ^ 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ (n + 0x9e3779b97f4a7c15ull));
  h = mix64(h ^ (rep + 0x632be59bd9b4e019ull));
  return h;
}

std::pair<std::vector<RunRecord>, std::vector<AggregateRow>> run_experiment(
    const ExperimentConfig& config, int threads) {
  if (config.model_id.empty()) throw ValidationError("experiment config: model_id is required");
  if (config.repetitions < 1) throw ValidationError("experiment config: repetitions must be >= 1");
  if (config.n_grid.empty()) throw ValidationError("experiment config: n_grid must be nonempty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] < 1) throw ValidationError("experiment config: n values must be >= 1");
    if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1])
      throw ValidationError("experiment config: n_grid must be strictly ascending");
  }

  const ParametricModel model = make_model(config.model_id);
  const PauliShadowScheme scheme(qubits_for_dim(model.hilbert_dim()));
  const DensityMatrix rho_true = resolve_true_state(config, model);

  struct Task {
    std::size_t n, rep, slot;
  };
  std::vector<Task> tasks;
  tasks.reserve(config.n_grid.size() * config.repetitions);
  for (std::size_t i = 0; i < config.n_grid.size(); ++i)
    for (std::size_t r = 0; r < config.repetitions; ++r)
      tasks.push_back({config.n_grid[i], r, i * config.repetitions + r});

  std::vector<RunRecord> records(tasks.size());
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min<int>(n_threads, static_cast<int>(tasks.size()));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task& task = tasks[k];
      try {
        records[task.slot] = run_one(config, model, scheme, rho_true, task.n, task.rep);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty())
          first_error = "repetition (n=" + std::to_string(task.n) +
                        ", rep=" + std::to_string(task.rep) + ") failed: " + e.what();
        next.store(tasks.size());  // stop claiming further work
        return;
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw Error(first_error);

  std::vector<AggregateRow> aggregates = aggregate_records(records);
  return {std::move(records), std::move(aggregates)};
}

std::vector<AggregateRow> aggregate_records(const std::vector<RunRecord>& records) {
  std::vector<std::size_t> ns;
  for (const RunRecord& r : records)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());

  std::vector<AggregateRow> rows;
  for (std::size_t n : ns) {
    AggregateRow row;
    row.n = n;
    for (const std::string& metric : kAggregateMetrics) {
      std::vector<double> values;
      for (const RunRecord& r : records)
        if (r.n == n) values.push_back(metric_value(r, metric));
      MetricStats stats;
      const double count = static_cast<double>(values.size());
      for (double v : values) stats.mean += v;
      stats.mean /= count;
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
        stats.stddev = std::sqrt(ss / (count - 1.0));
      }
      stats.stderr_mean = stats.stddev / std::sqrt(count);
      row.metrics.emplace_back(metric, stats);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_outputs(const std::vector<RunRecord>& records,
                   const std::vector<AggregateRow>& aggregates, const ExperimentConfig& config,
                   const std::string& output_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + output_dir + ": " + ec.message());

  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(output_dir) / name);
    if (!out) throw IoError("cannot open " + (fs::path(output_dir) / name).string());
    return out;
  };

  {
    std::ofstream out = open("runs.csv");
    out << "model_id,n,rep,seed,g_n_q,t_n_q,c_n_q,qwaic,g_n,t_n,waic,acceptance_rate,"
           "wall_time_ms\n";
    for (const RunRecord& r : records) {
      out << r.model_id << ',' << r.n << ',' << r.rep << ',' << r.seed << ','
          << fmt_double(r.criteria.g_n_q) << ',' << fmt_double(r.criteria.t_n_q) << ','
          << fmt_double(r.criteria.c_n_q) << ',' << fmt_double(r.criteria.qwaic) << ','
          << fmt_double(r.criteria.g_n) << ',' << fmt_double(r.criteria.t_n) << ','
          << fmt_double(r.criteria.waic) << ',' << fmt_double(r.acceptance_rate) << ','
          << fmt_double(r.wall_time_ms) << '\n';
    }
  }

  {
    std::ofstream out = open("aggregate.csv");
    out << "n";
    for (const std::string& metric : kAggregateMetrics)
      out << ',' << metric << "_mean," << metric << "_std," << metric << "_stderr";
    out << '\n';
    for (const AggregateRow& row : aggregates) {
      out << row.n;
      for (const auto& [name, stats] : row.metrics)
        out << ',' << fmt_double(stats.mean) << ',' << fmt_double(stats.stddev) << ','
            << fmt_double(stats.stderr_mean);
      out << '\n';
    }
  }

  for (const std::string& metric : kAggregateMetrics) {
    std::ofstream out = open("plot_" + metric + ".dat");
    out << "# n mean stderr\n";
    for (const AggregateRow& row : aggregates) {
      const auto it = std::find_if(row.metrics.begin(), row.metrics.end(),
                                   [&](const auto& kv) { return kv.first == metric; });
      out << row.n << ' ' << fmt_double(it->second.mean) << ' '
          << fmt_double(it->second.stderr_mean) << '\n';
    }
  }

  std::ofstream out = open("config.json");
  out << config_to_json(config) << '\n';
}

std::vector<RunRecord> read_runs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("runs csv is empty: " + path);
  const std::string expected =
      "model_id,n,rep,seed,g_n_q,t_n_q,c_n_q,qwaic,g_n,t_n,waic,acceptance_rate,wall_time_ms";
  if (line != expected) throw ValidationError("unexpected runs.csv header in " + path);

  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 13)
      throw ValidationError("bad runs.csv row with " + std::to_string(fields.size()) + " fields");
    RunRecord r;
    r.model_id = fields[0];
    r.n = std::stoull(fields[1]);
    r.rep = std::stoull(fields[2]);
    r.seed = std::stoull(fields[3]);
    r.criteria.g_n_q = std::stod(fields[4]);
    r.criteria.t_n_q = std::stod(fields[5]);
    r.criteria.c_n_q = std::stod(fields[6]);
    r.criteria.qwaic = std::stod(fields[7]);
    r.criteria.g_n = std::stod(fields[8]);
    r.criteria.t_n = std::stod(fields[9]);
    r.criteria.waic = std::stod(fields[10]);
    r.acceptance_rate = std::stod(fields[11]);
    r.wall_time_ms = std::stod(fields[12]);
    r.criteria.n = r.n;
    records.push_back(std::move(r));
  }
  return records;
}

std::string config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["model_id"] = config.model_id;
  j["true_state"] = config.rho_true_mat ? "matrix" : "model_point";
  if (config.rho_true_mat) {
    nlohmann::json rows = nlohmann::json::array();
    const ComplexMatrix& m = *config.rho_true_mat;
    for (int r = 0; r < m.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < m.dim(); ++c)
        row.push_back({{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
      rows.push_back(row);
    }
    j["rho_true"] = rows;
  } else if (!config.theta_true.empty()) {
    j["theta_true"] = config.theta_true;
  }
  j["n_grid"] = config.n_grid;
  j["repetitions"] = config.repetitions;
  j["master_seed"] = config.master_seed;
  j["output_dir"] = config.output_dir;
  j["mh"] = {{"n_samples", config.mh.n_samples},
             {"burn_in", config.mh.burn_in},
             {"step_scale", config.mh.step_scale},
             {"adapt_during_burn_in", config.mh.adapt_during_burn_in},
             {"target_acceptance", config.mh.target_acceptance}};
  return j.dump(2);
}

namespace {

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ValidationError("config: cannot parse boolean \"" + value + "\"");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  if (!j.contains("model_id")) throw ValidationError("config: missing required field model_id");
  config.model_id = j.at("model_id").get<std::string>();
  if (!j.contains("master_seed"))
    throw ValidationError("config: missing required field master_seed");
  config.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("theta_true")) config.theta_true = j.at("theta_true").get<std::vector<double>>();
  if (j.contains("rho_true")) {
    const auto& rows = j.at("rho_true");
    const int d = static_cast<int>(rows.size());
    ComplexMatrix m(d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        m(r, c) = cxd(rows[r][c].at("re").get<double>(), rows[r][c].at("im").get<double>());
    config.rho_true_mat = std::move(m);
  }
  if (j.contains("n_grid")) config.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  if (j.contains("repetitions")) config.repetitions = j.at("repetitions").get<std::size_t>();
  if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("mh")) {
    const auto& mh = j.at("mh");
    if (mh.contains("n_samples")) config.mh.n_samples = mh.at("n_samples").get<std::size_t>();
    if (mh.contains("burn_in")) config.mh.burn_in = mh.at("burn_in").get<std::size_t>();
    if (mh.contains("step_scale"))
      config.mh.step_scale = mh.at("step_scale").get<std::vector<double>>();
    if (mh.contains("adapt_during_burn_in"))
      config.mh.adapt_during_burn_in = mh.at("adapt_during_burn_in").get<bool>();
    if (mh.contains("target_acceptance"))
      config.mh.target_acceptance = mh.at("target_acceptance").get<double>();
  }
  return config;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return config_from_json(nlohmann::json::parse(text));

  ExperimentConfig config;
  bool have_model = false, have_seed = false;
  std::string variant;
  std::string section;
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section != "mh") throw ValidationError("config: unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: expected key = value, got \"" + line + "\"");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (section == "mh") {
      if (key == "n_samples")
        config.mh.n_samples = std::stoull(value);
      else if (key == "burn_in")
        config.mh.burn_in = std::stoull(value);
      else if (key == "step_scale")
        config.mh.step_scale = parse_double_list(value);
      else if (key == "adapt_during_burn_in")
        config.mh.adapt_during_burn_in = parse_bool(value);
      else if (key == "target_acceptance")
        config.mh.target_acceptance = std::stod(value);
      else
        throw ValidationError("config: unknown key \"" + key + "\" in [mh]");
      continue;
    }

    if (key == "model_id") {
      config.model_id = value;
      have_model = true;
    } else if (key == "model_variant") {
      variant = value;
    } else if (key == "master_seed") {
      config.master_seed = std::stoull(value);
      have_seed = true;
    } else if (key == "theta_true") {
      config.theta_true = parse_double_list(value);
    } else if (key == "n_grid") {
      config.n_grid.clear();
      for (double v : parse_double_list(value))
        config.n_grid.push_back(static_cast<std::size_t>(v));
    } else if (key == "repetitions") {
      config.repetitions = std::stoull(value);
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else {
      throw ValidationError("config: unknown key \"" + key + "\"");
    }
  }
  if (!have_model) throw ValidationError("config: missing required field model_id");
  if (!have_seed) throw ValidationError("config: missing required field master_seed");
  if (!variant.empty()) config.model_id += ":" + variant;
  return config;
}

}  // namespace qsing
