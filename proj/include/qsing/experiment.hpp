#ifndef QSING_EXPERIMENT_HPP
#define QSING_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsing/criteria.hpp"

namespace qsing {

struct ExperimentConfig {
  std::string model_id;
  std::vector<double> theta_true;             // empty: use the model's theta0
  std::optional<ComplexMatrix> rho_true_mat;  // explicit true state, overrides theta_true
  std::vector<std::size_t> n_grid = {2000, 4000, 6000, 8000};
  std::size_t repetitions = 100;
  MhConfig mh;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
};

struct RunRecord {
  std::string model_id;
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  CriteriaReport criteria;
  double acceptance_rate = 0.0;
  double wall_time_ms = 0.0;
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double stderr_mean = 0.0;
};

struct AggregateRow {
  std::size_t n = 0;
  std::vector<std::pair<std::string, MetricStats>> metrics;  // fixed metric order
};

// Stateless avalanche mix of (master_seed, n, rep); distinct triples give
// distinct streams.
std::uint64_t derive_child_seed(std::uint64_t master_seed, std::uint64_t n, std::uint64_t rep);

// One full (sample -> estimate -> criteria) pass per (n, repetition), run in
// parallel over a thread pool. threads <= 0 selects the hardware concurrency.
// The result does not depend on the thread count.
std::pair<std::vector<RunRecord>, std::vector<AggregateRow>> run_experiment(
    const ExperimentConfig& config, int threads = 0);

std::vector<AggregateRow> aggregate_records(const std::vector<RunRecord>& records);

// Writes runs.csv, aggregate.csv, config.json and plot_<metric>.dat into
// output_dir (created if absent).
void write_outputs(const std::vector<RunRecord>& records,
                   const std::vector<AggregateRow>& aggregates, const ExperimentConfig& config,
                   const std::string& output_dir);

std::vector<RunRecord> read_runs_csv(const std::string& path);

// Config files: '#' comments, "key = value" lines, "[mh]" section for the
// sampler block; JSON files (as emitted in config.json) are accepted too.
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

extern const std::vector<std::string> kAggregateMetrics;

}  // namespace qsing

#endif
