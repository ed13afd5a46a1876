#include "rvrp/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "rvrp/rng.hpp"

namespace rvrp {

void ExperimentConfig::validate() const {
    if (iterations < 1) throw input_error("iterations must be >= 1");
    if (!(speed_mean_mps > 0.0)) throw input_error("speed mean must be > 0");
    if (speed_std_mps < 0.0) throw input_error("speed std must be >= 0");
    if (n_goals < 1 || n_robots < n_goals) throw input_error("need N >= M >= 1");
    if (deployment_caps.empty()) throw input_error("no deployment caps configured");
    for (int cap : deployment_caps)
        if (cap < n_goals || cap > n_robots)
            throw input_error("deployment cap " + std::to_string(cap) +
                              " violates M <= N_d <= N");
    if (noises.empty()) throw input_error("no noise models configured");
    if (methods.empty()) throw input_error("no methods configured");
    if (!(p_min >= 0.0 && p_min < 1.0)) throw input_error("p_min must lie in [0, 1)");
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<TrialOutcome> run_trial(const ExperimentConfig& config, const TransportGraph& graph,
                                    std::uint64_t trial_seed) {
    config.validate();
    const int n = config.n_robots, m = config.n_goals;
    if (n + m > graph.node_count())
        throw input_error("N + M = " + std::to_string(n + m) + " exceeds the " +
                          std::to_string(graph.node_count()) + " grid nodes");

    Rng rng(trial_seed);
    const std::vector<int> placement = rng.sample_without_replacement(graph.node_count(), n + m);
    const std::vector<int> robot_nodes(placement.begin(), placement.begin() + n);
    const std::vector<int> goal_nodes(placement.begin() + n, placement.end());

    std::vector<double> speed(n);
    for (int i = 0; i < n; ++i)
        speed[i] = config.speed_std_mps == 0.0
                       ? config.speed_mean_mps
                       : rng.truncated_normal(config.speed_mean_mps, config.speed_std_mps,
                                              config.speed_mean_mps / 5.0);

    const TravelTimeTable table = shortest_travel_times(graph, goal_nodes);
    // realized travel time: path length / sampled speed
    auto realized_time = [&](int robot, int goal) {
        return table.at(goal, robot_nodes[robot]) * (config.speed_mean_mps / speed[robot]);
    };

    std::vector<TrialOutcome> outcomes;
    for (std::size_t noise_idx = 0; noise_idx < config.noises.size(); ++noise_idx) {
        const NoiseSpec& noise = config.noises[noise_idx];

        AssignmentInstance inst;
        inst.deployment_cap = config.deployment_caps.front();
        inst.goal_nodes = goal_nodes;
        inst.true_nodes = robot_nodes;
        inst.table = table;
        inst.beliefs.reserve(n);
        for (int i = 0; i < n; ++i) {
            const GraphNode& nd = graph.node(robot_nodes[i]);
            const Point reported = sample_reported_position({nd.x, nd.y}, noise, rng);
            inst.beliefs.push_back(node_belief(graph, reported, noise, config.p_min, i));
        }

        const Assignment initial = initial_assignment(inst);
        std::vector<double> hungarian_waits(m);
        for (const Edge& e : initial.edges) hungarian_waits[e.goal] = realized_time(e.robot, e.goal);
        double hungarian_mean = 0.0;
        for (double w : hungarian_waits) hungarian_mean += w;
        hungarian_mean /= m;

        for (int cap : config.deployment_caps) {
            inst.deployment_cap = cap;
            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                const Method method = config.methods[mi];
                SolverReport report;
                switch (method) {
                    case Method::greedy: report = greedy(inst, initial); break;
                    case Method::optimal: report = exhaustive_optimal(inst, initial); break;
                    case Method::slice_greedy: report = slice_greedy(inst, initial); break;
                    case Method::random:
                        report = random_assign(inst, initial,
                                               derive_seed(trial_seed, 0x9000u + noise_idx * 1024 +
                                                                           static_cast<std::uint64_t>(cap)));
                        break;
                    case Method::hungarian_only: report = hungarian_only(inst, initial); break;
                    case Method::true_oracle: report = true_oracle(inst); break;
                }

                TrialOutcome out;
                out.noise = noise;
                out.method = method;
                out.cap = cap;
                out.expected_cost_j = report.cost;
                out.realized_wait_per_goal.assign(m, std::numeric_limits<double>::infinity());
                for (const Edge& e : report.initial.edges)
                    out.realized_wait_per_goal[e.goal] =
                        std::min(out.realized_wait_per_goal[e.goal], realized_time(e.robot, e.goal));
                for (const Edge& e : report.redundant.edges)
                    out.realized_wait_per_goal[e.goal] =
                        std::min(out.realized_wait_per_goal[e.goal], realized_time(e.robot, e.goal));
                for (double w : out.realized_wait_per_goal) out.realized_mean += w;
                out.realized_mean /= m;
                out.normalized = out.realized_mean / hungarian_mean;
                outcomes.push_back(std::move(out));
            }
        }
    }
    return outcomes;
}

std::vector<TrialOutcome> run_trial(const ExperimentConfig& config, std::uint64_t trial_seed) {
    const TransportGraph graph =
        build_grid(config.grid.rows, config.grid.cols, config.grid.spacing_m, config.speed_mean_mps);
    return run_trial(config, graph, trial_seed);
}

ResultsTable run_series(const ExperimentConfig& config) {
    config.validate();
    const TransportGraph graph =
        build_grid(config.grid.rows, config.grid.cols, config.grid.spacing_m, config.speed_mean_mps);

    std::vector<std::vector<TrialOutcome>> trials(config.iterations);
    parallel_for(config.iterations, config.jobs, [&](int t) {
        trials[t] = run_trial(config, graph, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    });

    const int per_trial = static_cast<int>(trials[0].size());
    ResultsTable table;
    for (int slot = 0; slot < per_trial; ++slot) {
        SeriesRow row;
        row.series = config.series;
        row.noise = trials[0][slot].noise;
        row.n_robots = config.n_robots;
        row.n_goals = config.n_goals;
        row.cap = trials[0][slot].cap;
        row.method = trials[0][slot].method;
        row.iterations = config.iterations;

        double sum = 0.0, sum_wait = 0.0, sum_j = 0.0;
        for (const auto& trial : trials) {
            sum += trial[slot].normalized;
            sum_wait += trial[slot].realized_mean;
            sum_j += trial[slot].expected_cost_j;
        }
        const double mean = sum / config.iterations;
        double var = 0.0;
        for (const auto& trial : trials) {
            const double d = trial[slot].normalized - mean;
            var += d * d;
        }
        const double sd = config.iterations > 1 ? std::sqrt(var / (config.iterations - 1)) : 0.0;
        const double half = 1.96 * sd / std::sqrt(static_cast<double>(config.iterations));
        row.mean_norm_wait = mean;
        row.ci_low = mean - half;
        row.ci_high = mean + half;
        row.mean_wait_s = sum_wait / config.iterations;
        row.mean_expected_j = sum_j / config.iterations;
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultsTable run_noise_sweep(const ExperimentConfig& config) {
    if (config.deployment_caps.size() != 1)
        throw input_error("noise sweep expects exactly one deployment cap");
    return run_series(config);
}

namespace {

const char* noise_kind_name(const NoiseSpec& n) {
    switch (n.kind) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::laplace: return "laplace";
        case NoiseKind::circular_uniform: return "uniform";
        case NoiseKind::none: return "none";
    }
    return "?";
}

std::string format_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

void write_results_csv(const ResultsTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write results csv: " + path);
    out << "series,noise_kind,noise_scale,N,M,N_d,method,mean_norm_wait,ci_low,ci_high,"
           "mean_wait_s,iterations\n";
    for (const SeriesRow& r : table.rows) {
        out << r.series << ',' << noise_kind_name(r.noise) << ',' << format_g(r.noise.scale) << ','
            << r.n_robots << ',' << r.n_goals << ',' << r.cap << ',' << method_name(r.method) << ','
            << format_g(r.mean_norm_wait) << ',' << format_g(r.ci_low) << ',' << format_g(r.ci_high)
            << ',' << format_g(r.mean_wait_s) << ',' << r.iterations << '\n';
    }
}

void write_panel_data(const ResultsTable& table, const std::string& prefix) {
    // group rows by (series, noise); one panel file each, rows keyed by N_d
    std::map<std::string, std::map<int, std::vector<const SeriesRow*>>> panels;
    for (const SeriesRow& r : table.rows) {
        const std::string key =
            r.series + "_" + noise_kind_name(r.noise) + format_g(r.noise.scale);
        panels[key][r.cap].push_back(&r);
    }
    for (const auto& [key, by_cap] : panels) {
        const std::string path = prefix + "_panel_" + key + ".dat";
        std::ofstream out(path);
        if (!out) throw input_error("cannot write panel file: " + path);
        out << "# N_d";
        for (const SeriesRow* r : by_cap.begin()->second)
            out << ' ' << method_name(r->method) << "_mean " << method_name(r->method) << "_lo "
                << method_name(r->method) << "_hi";
        out << '\n';
        for (const auto& [cap, rows] : by_cap) {
            out << cap;
            for (const SeriesRow* r : rows)
                out << ' ' << format_g(r->mean_norm_wait) << ' ' << format_g(r->ci_low) << ' '
                    << format_g(r->ci_high);
            out << '\n';
        }
    }
}

void write_sweep_data(const ResultsTable& table, const std::string& prefix) {
    // rows keyed by noise scale, columns per method
    std::map<double, std::vector<const SeriesRow*>> by_scale;
    for (const SeriesRow& r : table.rows) by_scale[r.noise.scale].push_back(&r);
    const std::string path = prefix + "_sweep.dat";
    std::ofstream out(path);
    if (!out) throw input_error("cannot write sweep file: " + path);
    out << "# noise_scale";
    if (!by_scale.empty())
        for (const SeriesRow* r : by_scale.begin()->second)
            out << ' ' << method_name(r->method) << "_mean " << method_name(r->method) << "_lo "
                << method_name(r->method) << "_hi";
    out << '\n';
    for (const auto& [scale, rows] : by_scale) {
        out << format_g(scale);
        for (const SeriesRow* r : rows)
            out << ' ' << format_g(r->mean_norm_wait) << ' ' << format_g(r->ci_low) << ' '
                << format_g(r->ci_high);
        out << '\n';
    }
}

}  // namespace rvrp
