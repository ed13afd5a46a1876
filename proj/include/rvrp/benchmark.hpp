#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rvrp/instance.hpp"
#include "rvrp/solvers.hpp"

namespace rvrp {

struct GridSpec {
    int rows = 16;
    int cols = 16;
    double spacing_m = 50.0;
};

struct ExperimentConfig {
    GridSpec grid;
    int n_robots = 16;
    int n_goals = 4;
    std::vector<int> deployment_caps;  // N_d values to evaluate
    std::vector<NoiseSpec> noises;
    int iterations = 500;
    double speed_mean_mps = 10.0;  // also the grid's nominal speed
    double speed_std_mps = 2.0;
    std::uint64_t seed = 0;
    std::vector<Method> methods;
    double p_min = 1e-6;
    int jobs = 0;  // 0 = hardware concurrency
    std::string series = "A";

    void validate() const;
};

/// One (noise, cap, method) evaluation of a single trial.
struct TrialOutcome {
    NoiseSpec noise;
    Method method = Method::greedy;
    int cap = 0;
    std::vector<double> realized_wait_per_goal;  // seconds, sampled truth
    double realized_mean = 0.0;
    double normalized = 0.0;       // realized_mean / Hungarian realized_mean
    double expected_cost_j = 0.0;  // planner-side J of the method's assignment
};

/// Samples a world (true nodes, speeds), then for each configured noise builds
/// one noisy instance and runs every configured method on it. Deterministic in
/// (config, trial_seed): bit-identical on reruns.
std::vector<TrialOutcome> run_trial(const ExperimentConfig& config, const TransportGraph& graph,
                                    std::uint64_t trial_seed);
std::vector<TrialOutcome> run_trial(const ExperimentConfig& config, std::uint64_t trial_seed);

struct SeriesRow {
    std::string series;
    NoiseSpec noise;
    int n_robots = 0, n_goals = 0, cap = 0;
    Method method = Method::greedy;
    double mean_norm_wait = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // 95% normal approximation
    double mean_wait_s = 0.0;
    double mean_expected_j = 0.0;
    int iterations = 0;
};

struct ResultsTable {
    std::vector<SeriesRow> rows;
};

/// Full (noise x N_d x method) sweep; trial i uses seed xor hash(i), so the
/// table is reproducible bit-for-bit regardless of the jobs setting.
ResultsTable run_series(const ExperimentConfig& config);

/// Noise sweep at a fixed deployment cap (config.deployment_caps must hold
/// exactly one value).
ResultsTable run_noise_sweep(const ExperimentConfig& config);

void write_results_csv(const ResultsTable& table, const std::string& path);

/// Gnuplot-style whitespace panels, one file per (series, noise): rows are N_d
/// values, columns are mean/lo/hi per method.
void write_panel_data(const ResultsTable& table, const std::string& prefix);

/// Panel for a noise sweep: rows are noise scales.
void write_sweep_data(const ResultsTable& table, const std::string& prefix);

/// Runs fn(0..n-1) on `jobs` threads; any exception is rethrown on the caller.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace rvrp
