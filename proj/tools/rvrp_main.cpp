// rvrp: redundant robot-to-goal assignment under travel-time uncertainty.
// Subcommands: gen-grid, gen-instance, solve, bench, sweep, replay, gen-trace.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rvrp/benchmark.hpp"
#include "rvrp/dispatch.hpp"
#include "rvrp/instance.hpp"
#include "rvrp/objective.hpp"
#include "rvrp/rng.hpp"
#include "rvrp/solvers.hpp"

namespace {

constexpr const char* kVersion = "rvrp 1.0.0";

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RVRP_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// Expands "--config FILE" into option tokens placed before the user's own
// flags; with TakeLast options the command line overrides the config file.
std::vector<std::string> expand_config_tokens(int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    if (raw.empty()) return raw;

    std::string config_path;
    std::vector<std::string> rest;
    rest.push_back(raw[0]);  // subcommand
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i] == "--config" && i + 1 < raw.size()) {
            config_path = raw[++i];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            config_path = raw[i].substr(9);
        } else {
            rest.push_back(raw[i]);
        }
    }
    if (config_path.empty()) return raw;

    std::ifstream in(config_path);
    if (!in) throw rvrp::input_error("cannot open config file: " + config_path);
    std::vector<std::string> tokens{raw[0]};
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw rvrp::input_error("config line is not key=value: " + line);
        const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "with-optimal") {  // the only bare flag
            if (value != "0") tokens.push_back("--with-optimal");
        } else {
            tokens.push_back("--" + key + "=" + value);
        }
    }
    tokens.insert(tokens.end(), rest.begin() + 1, rest.end());
    return tokens;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

// "16x16:50:10" -> rows, cols, spacing, nominal speed
struct GridArg {
    int rows = 16, cols = 16;
    double spacing = 50.0, speed = 10.0;
};

GridArg parse_grid(const std::string& text) {
    GridArg g;
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw rvrp::input_error("grid spec needs ROWSxCOLS[:spacing[:speed]]");
    const auto parts = split(text.substr(x + 1), ':');
    try {
        g.rows = std::stoi(text.substr(0, x));
        g.cols = std::stoi(parts.at(0));
        if (parts.size() > 1) g.spacing = std::stod(parts[1]);
        if (parts.size() > 2) g.speed = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw rvrp::input_error("bad grid spec '" + text + "'");
    }
    return g;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    for (const std::string& p : split(text, ',')) values.push_back(std::stoi(p));
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    for (const std::string& p : split(text, ',')) values.push_back(std::stod(p));
    return values;
}

// flat key=value manifest next to every output; feeding it back through
// --config reproduces the run
class Manifest {
public:
    explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}
    void set(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
    }
    void set(const std::string& key, std::uint64_t v) { set(key, std::to_string(v)); }
    void set(const std::string& key, int v) { set(key, std::to_string(v)); }
    void set(const std::string& key, double v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        set(key, std::string(buf));
    }
    void add_output(const std::string& path) { outputs_.push_back(path); }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw rvrp::input_error("cannot write manifest: " + path);
        out << "# " << kVersion << " manifest\n";
        out << "# subcommand: " << subcommand_ << "\n";
        for (const std::string& o : outputs_) out << "# output: " << o << "\n";
        for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
    }

private:
    std::string subcommand_;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::string> outputs_;
};

struct CommonGraphArgs {
    std::string grid_text;
    std::string graph_path;

    rvrp::TransportGraph realize() const {
        if (!graph_path.empty()) return rvrp::load_graph(graph_path);
        const GridArg g = parse_grid(grid_text.empty() ? "16x16:50:10" : grid_text);
        return rvrp::build_grid(g.rows, g.cols, g.spacing, g.speed);
    }
};

void print_report(const rvrp::SolverReport& report) {
    char buf[64];
    std::printf("method=%s\n", rvrp::method_name(report.method));
    std::snprintf(buf, sizeof buf, "%.17g", report.baseline);
    std::printf("J0=%s\n", buf);
    std::snprintf(buf, sizeof buf, "%.17g", report.cost);
    std::printf("J=%s\n", buf);
    std::snprintf(buf, sizeof buf, "%.17g", report.normalized());
    std::printf("normalized=%s\n", buf);
    std::printf("objective_calls=%llu\n", static_cast<unsigned long long>(report.objective_calls));
    std::printf("wall_time_s=%.6f\n", report.wall_time_s);
    std::string edges;
    for (const rvrp::Edge& e : report.redundant.edges) {
        if (!edges.empty()) edges += ';';
        edges += std::to_string(e.robot) + ":" + std::to_string(e.goal);
    }
    std::printf("A=%s\n", edges.empty() ? "-" : edges.c_str());
}

int run_gen_grid(const GridArg& grid, const std::string& out) {
    const rvrp::TransportGraph graph =
        rvrp::build_grid(grid.rows, grid.cols, grid.spacing, grid.speed);
    rvrp::save_graph(graph, out);
    Manifest manifest("gen-grid");
    manifest.set("rows", grid.rows);
    manifest.set("cols", grid.cols);
    manifest.set("spacing", grid.spacing);
    manifest.set("speed", grid.speed);
    manifest.set("out", out);
    manifest.add_output(out);
    manifest.write(out + ".manifest");
    std::printf("wrote %s: %d nodes, %d edges\n", out.c_str(), graph.node_count(),
                graph.edge_count());
    return 0;
}

int run_gen_instance(const CommonGraphArgs& source, int n, int m, int cap,
                     const std::string& noise_text, double p_min, std::uint64_t seed,
                     const std::string& out) {
    const rvrp::TransportGraph graph = source.realize();
    if (n + m > graph.node_count())
        throw rvrp::input_error("N + M exceeds the number of graph nodes");
    const rvrp::NoiseSpec noise = rvrp::NoiseSpec::parse(noise_text);

    rvrp::Rng placement(rvrp::derive_seed(seed, 1));
    const std::vector<int> nodes = placement.sample_without_replacement(graph.node_count(), n + m);

    rvrp::InstanceSpec spec;
    if (!source.graph_path.empty()) {
        spec.graph_path = source.graph_path;
    } else {
        const GridArg g = parse_grid(source.grid_text.empty() ? "16x16:50:10" : source.grid_text);
        spec.grid_rows = g.rows;
        spec.grid_cols = g.cols;
        spec.grid_spacing = g.spacing;
        spec.grid_speed = g.speed;
    }
    spec.robot_nodes.assign(nodes.begin(), nodes.begin() + n);
    spec.goal_nodes.assign(nodes.begin() + n, nodes.end());
    spec.noise = noise;
    spec.p_min = p_min;
    spec.deployment_cap = cap;
    spec.seed = seed;

    rvrp::realize_instance(spec, graph);  // validates before writing
    rvrp::save_instance_spec(spec, out);

    Manifest manifest("gen-instance");
    if (!source.grid_text.empty()) manifest.set("grid", source.grid_text);
    if (!source.graph_path.empty()) manifest.set("graph", source.graph_path);
    manifest.set("n", n);
    manifest.set("m", m);
    manifest.set("cap", cap);
    manifest.set("noise", noise_text);
    manifest.set("p-min", p_min);
    manifest.set("seed", seed);
    manifest.set("out", out);
    manifest.add_output(out);
    manifest.write(out + ".manifest");
    std::printf("wrote %s: N=%d M=%d cap=%d\n", out.c_str(), n, m, cap);
    return 0;
}

int run_solve(const std::string& instance_path, const std::string& method_text, bool with_optimal,
              std::uint64_t seed, const std::string& out) {
    const rvrp::InstanceSpec spec = rvrp::load_instance_spec(instance_path);
    const std::string base_dir = std::filesystem::path(instance_path).parent_path().string();
    const rvrp::TransportGraph graph = rvrp::realize_graph(spec, base_dir);
    const rvrp::AssignmentInstance inst = rvrp::realize_instance(spec, graph);
    const rvrp::Assignment initial = rvrp::initial_assignment(inst);

    const rvrp::Method method = rvrp::parse_method(method_text);
    rvrp::SolverReport report;
    switch (method) {
        case rvrp::Method::greedy: report = rvrp::greedy(inst, initial); break;
        case rvrp::Method::optimal: report = rvrp::exhaustive_optimal(inst, initial); break;
        case rvrp::Method::slice_greedy: report = rvrp::slice_greedy(inst, initial); break;
        case rvrp::Method::random: report = rvrp::random_assign(inst, initial, seed); break;
        case rvrp::Method::hungarian_only: report = rvrp::hungarian_only(inst, initial); break;
        case rvrp::Method::true_oracle: report = rvrp::true_oracle(inst); break;
    }
    print_report(report);

    if (with_optimal) {
        const rvrp::SolverReport optimal = rvrp::exhaustive_optimal(inst, initial);
        const rvrp::SolverReport lhs =
            method == rvrp::Method::greedy ? report : rvrp::greedy(inst, initial);
        const rvrp::BoundCertificate cert = rvrp::verify_bound(lhs, optimal);
        char buf[64];
        std::printf("bound_holds=%d\n", cert.holds ? 1 : 0);
        std::snprintf(buf, sizeof buf, "%.17g", cert.lhs);
        std::printf("bound_lhs=%s\n", buf);
        std::snprintf(buf, sizeof buf, "%.17g", cert.rhs);
        std::printf("bound_rhs=%s\n", buf);
        std::snprintf(buf, sizeof buf, "%.17g", cert.optimal_cost);
        std::printf("J_optimal=%s\n", buf);
    }

    if (!out.empty()) {
        std::ofstream csv(out);
        if (!csv) throw rvrp::input_error("cannot write report csv: " + out);
        csv << rvrp::SolverReport::csv_header() << "\n" << report.csv_row() << "\n";
        Manifest manifest("solve");
        manifest.set("instance", instance_path);
        manifest.set("method", method_text);
        manifest.set("with-optimal", with_optimal ? 1 : 0);
        manifest.set("seed", seed);
        manifest.set("out", out);
        manifest.add_output(out);
        manifest.write(out + ".manifest");
    }
    return 0;
}

struct BenchArgs {
    std::string series = "A";
    std::string grid_text;
    int n = 0, m = 0;
    std::string caps_text;
    std::string noise_text = "gaussian:100";
    std::string methods_text;
    int iterations = 500;
    double speed_mean = 10.0, speed_std = 2.0;
    double p_min = 1e-6;
    std::uint64_t seed = 0;
    int jobs = 0;
    std::string sweep_text;  // non-empty switches to a noise sweep
    std::string sweep_kind = "gaussian";
    int sweep_cap = 8;
    std::string out = "bench";
};

rvrp::ExperimentConfig make_bench_config(const BenchArgs& args) {
    rvrp::ExperimentConfig config;
    config.series = args.series;
    if (args.series == "A") {
        config.n_robots = 16;
        config.n_goals = 4;
        config.deployment_caps = {4, 6, 8, 10, 12, 14, 16};
    } else if (args.series == "B") {
        config.n_robots = 100;
        config.n_goals = 10;
        config.deployment_caps = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    } else {
        throw rvrp::input_error("series must be A or B");
    }
    if (args.n > 0) config.n_robots = args.n;
    if (args.m > 0) config.n_goals = args.m;
    if (!args.caps_text.empty()) config.deployment_caps = parse_int_list(args.caps_text);

    const GridArg g = parse_grid(args.grid_text.empty() ? "16x16:50:10" : args.grid_text);
    config.grid = {g.rows, g.cols, g.spacing};
    config.speed_mean_mps = args.speed_mean;
    config.speed_std_mps = args.speed_std;
    config.iterations = args.iterations;
    config.p_min = args.p_min;
    config.seed = args.seed;
    config.jobs = args.jobs;

    if (!args.sweep_text.empty()) {
        config.deployment_caps = {args.sweep_cap};
        config.noises.clear();
        for (double scale : parse_double_list(args.sweep_text)) {
            rvrp::NoiseSpec n;
            n.kind = args.sweep_kind == "gaussian"  ? rvrp::NoiseKind::gaussian
                     : args.sweep_kind == "laplace" ? rvrp::NoiseKind::laplace
                                                    : rvrp::NoiseKind::circular_uniform;
            n.scale = scale;
            config.noises.push_back(n);
        }
    } else {
        for (const std::string& s : split(args.noise_text, ','))
            config.noises.push_back(rvrp::NoiseSpec::parse(s));
    }

    const std::string methods = args.methods_text.empty()
                                    ? "greedy,slice_greedy,random,hungarian,true"
                                    : args.methods_text;
    for (const std::string& m : split(methods, ','))
        config.methods.push_back(rvrp::parse_method(m));
    return config;
}

int run_bench(const BenchArgs& args, bool sweep_subcommand) {
    const rvrp::ExperimentConfig config = make_bench_config(args);
    const bool sweeping = !args.sweep_text.empty();
    const rvrp::ResultsTable table =
        sweeping ? rvrp::run_noise_sweep(config) : rvrp::run_series(config);

    const std::string csv_path = args.out + ".csv";
    rvrp::write_results_csv(table, csv_path);
    if (sweeping)
        rvrp::write_sweep_data(table, args.out);
    else
        rvrp::write_panel_data(table, args.out);

    Manifest manifest(sweep_subcommand ? "sweep" : "bench");
    manifest.set("series", args.series);
    if (!args.grid_text.empty()) manifest.set("grid", args.grid_text);
    manifest.set("n", config.n_robots);
    manifest.set("m", config.n_goals);
    if (!args.caps_text.empty()) manifest.set("caps", args.caps_text);
    manifest.set("noise", args.noise_text);
    if (!args.methods_text.empty()) manifest.set("methods", args.methods_text);
    manifest.set("iterations", args.iterations);
    manifest.set("speed-mean", args.speed_mean);
    manifest.set("speed-std", args.speed_std);
    manifest.set("p-min", args.p_min);
    manifest.set("seed", args.seed);
    manifest.set("jobs", args.jobs);
    if (sweeping) {
        manifest.set(sweep_subcommand ? "sigmas" : "sweep", args.sweep_text);
        manifest.set("sweep-kind", args.sweep_kind);
        manifest.set("nd", args.sweep_cap);
    }
    manifest.set("out", args.out);
    manifest.add_output(csv_path);
    manifest.write(args.out + ".manifest");

    std::printf("wrote %s (%d rows)\n", csv_path.c_str(), static_cast<int>(table.rows.size()));
    for (const rvrp::SeriesRow& r : table.rows)
        std::printf("  %s noise=%s N_d=%d %s: norm=%.4f [%.4f, %.4f] wait=%.1fs expJ=%.1fs\n",
                    r.series.c_str(), r.noise.str().c_str(), r.cap, rvrp::method_name(r.method),
                    r.mean_norm_wait, r.ci_low, r.ci_high, r.mean_wait_s, r.mean_expected_j);
    return 0;
}

struct ReplayArgs {
    std::string trace_path;
    std::string synthetic;  // "rate=0.5,hours=2"
    std::string grid_text = "16x16:50:1";
    std::string graph_path;
    std::string policy = "both";
    std::string noise_text = "gaussian:100";
    double fleet_factor = 1.56;
    double batch_s = 20.0;
    double drop_after_s = 600.0;
    double p_min = 1e-6;
    double min_gain_s = 3.0;
    std::uint64_t seed = 0;
    std::string out = "replay";
};

int run_replay(const ReplayArgs& args) {
    CommonGraphArgs source{args.grid_text, args.graph_path};
    const rvrp::TransportGraph graph = source.realize();

    rvrp::RequestTrace trace;
    if (!args.synthetic.empty()) {
        double rate = 0.5, hours = 2.0;
        for (const std::string& kv : split(args.synthetic, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw rvrp::input_error("synthetic spec needs key=value pairs");
            const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
            if (key == "rate") rate = std::stod(value);
            else if (key == "hours") hours = std::stod(value);
            else if (key == "seconds") hours = std::stod(value) / 3600.0;
            else throw rvrp::input_error("unknown synthetic key '" + key + "'");
        }
        trace = rvrp::generate_synthetic_trace(graph, rate, hours * 3600.0,
                                               rvrp::derive_seed(args.seed, 0xace));
    } else if (!args.trace_path.empty()) {
        trace = rvrp::load_trace(args.trace_path, graph);
    } else {
        throw rvrp::input_error("replay needs --trace or --synthetic");
    }

    std::vector<rvrp::DispatchPolicy> policies;
    if (args.policy == "both")
        policies = {rvrp::DispatchPolicy::redundant, rvrp::DispatchPolicy::non_redundant};
    else
        policies = {rvrp::parse_policy(args.policy)};

    Manifest manifest("replay");
    if (!args.trace_path.empty()) manifest.set("trace", args.trace_path);
    if (!args.synthetic.empty()) manifest.set("synthetic", args.synthetic);
    if (!args.grid_text.empty()) manifest.set("grid", args.grid_text);
    if (!args.graph_path.empty()) manifest.set("graph", args.graph_path);
    manifest.set("policy", args.policy);
    manifest.set("noise", args.noise_text);
    manifest.set("fleet-factor", args.fleet_factor);
    manifest.set("batch", args.batch_s);
    manifest.set("drop-after", args.drop_after_s);
    manifest.set("p-min", args.p_min);
    manifest.set("min-gain", args.min_gain_s);
    manifest.set("seed", args.seed);
    manifest.set("out", args.out);

    for (const rvrp::DispatchPolicy policy : policies) {
        rvrp::ReplayParams params;
        params.policy = policy;
        params.noise = rvrp::NoiseSpec::parse(args.noise_text);
        params.fleet_factor = args.fleet_factor;
        params.seed = args.seed;
        params.batch_interval_s = args.batch_s;
        params.drop_after_s = args.drop_after_s;
        params.p_min = args.p_min;
        params.min_hedge_gain_s = args.min_gain_s;

        const rvrp::DispatchStats stats = rvrp::replay(graph, trace, params);
        const rvrp::StatsSummary summary = rvrp::summarize(stats);

        const std::string prefix = args.out + "_" + rvrp::policy_name(policy);
        rvrp::write_request_csv(stats, policy, prefix + "_requests.csv");
        rvrp::write_batch_csv(stats, prefix + "_batches.csv");
        rvrp::write_summary(summary, policy, prefix + "_summary.txt");
        manifest.add_output(prefix + "_requests.csv");
        manifest.add_output(prefix + "_batches.csv");
        manifest.add_output(prefix + "_summary.txt");

        if (summary.empty) {
            std::printf("%s: empty (no serviced requests; %d dropped of %d)\n",
                        rvrp::policy_name(policy), summary.dropped, summary.total);
        } else {
            std::printf("%s: mean=%.1fs std=%.1fs median=%.1fs p95=%.1fs drop_rate=%.4f "
                        "redundancy=%.2f\n",
                        rvrp::policy_name(policy), summary.mean_s, summary.std_s, summary.median_s,
                        summary.p95_s, summary.drop_rate, summary.mean_redundancy);
        }
    }
    manifest.write(args.out + ".manifest");
    return 0;
}

int run_gen_trace(const CommonGraphArgs& source, double rate, double duration_s,
                  std::uint64_t seed, const std::string& out) {
    const rvrp::TransportGraph graph = source.realize();
    const rvrp::RequestTrace trace = rvrp::generate_synthetic_trace(graph, rate, duration_s, seed);
    rvrp::save_trace(trace, out);
    Manifest manifest("gen-trace");
    manifest.set("rate", rate);
    manifest.set("duration-s", duration_s);
    if (!source.grid_text.empty()) manifest.set("grid", source.grid_text);
    if (!source.graph_path.empty()) manifest.set("graph", source.graph_path);
    manifest.set("seed", seed);
    manifest.set("out", out);
    manifest.add_output(out);
    manifest.write(out + ".manifest");
    std::printf("wrote %s: %d requests\n", out.c_str(), static_cast<int>(trace.events.size()));
    return 0;
}

template <typename T>
CLI::Option* addopt(CLI::App* cmd, const std::string& name, T& var,
                    const std::string& desc = "") {
    return cmd->add_option(name, var, desc)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"redundant robot-to-goal assignment under travel-time uncertainty"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::string config_file;  // consumed by the expander; bound here for --help

    auto* gen_grid = app.add_subcommand("gen-grid", "write a grid transport graph file");
    GridArg grid_args;
    std::string gen_grid_out = "grid.graph";
    addopt(gen_grid, "--rows", grid_args.rows);
    addopt(gen_grid, "--cols", grid_args.cols);
    addopt(gen_grid, "--spacing", grid_args.spacing, "meters between nodes");
    addopt(gen_grid, "--speed", grid_args.speed, "nominal speed m/s");
    addopt(gen_grid, "--out", gen_grid_out);
    gen_grid->add_option("--config", config_file, "flat key=value config file; flags override");

    auto* gen_inst = app.add_subcommand("gen-instance", "sample and write a solvable instance");
    CommonGraphArgs gi_source;
    int gi_n = 16, gi_m = 4, gi_cap = 8;
    std::string gi_noise = "gaussian:100";
    double gi_pmin = 1e-6;
    std::uint64_t gi_seed = default_seed();
    std::string gi_out = "instance.rvrp";
    addopt(gen_inst, "--grid", gi_source.grid_text, "ROWSxCOLS[:spacing[:speed]]");
    addopt(gen_inst, "--graph", gi_source.graph_path, "graph file path");
    addopt(gen_inst, "--n", gi_n, "robots");
    addopt(gen_inst, "--m", gi_m, "goals");
    addopt(gen_inst, "--cap", gi_cap, "deployment cap N_d");
    addopt(gen_inst, "--noise", gi_noise);
    addopt(gen_inst, "--p-min", gi_pmin);
    addopt(gen_inst, "--seed", gi_seed);
    addopt(gen_inst, "--out", gi_out);
    gen_inst->add_option("--config", config_file, "flat key=value config file; flags override");

    auto* solve = app.add_subcommand("solve", "run one method on an instance file");
    std::string solve_instance, solve_method = "greedy", solve_out;
    bool solve_with_optimal = false;
    std::uint64_t solve_seed = default_seed();
    addopt(solve, "--instance", solve_instance)->required();
    addopt(solve, "--method", solve_method,
                      "greedy|optimal|slice_greedy|random|hungarian|true");
    solve->add_flag("--with-optimal", solve_with_optimal, "also run optimal and check the bound");
    addopt(solve, "--seed", solve_seed, "seed for --method random");
    addopt(solve, "--out", solve_out, "also write a one-row CSV");
    solve->add_option("--config", config_file, "flat key=value config file; flags override");

    BenchArgs bench_args;
    bench_args.seed = default_seed();
    auto add_bench_options = [&](CLI::App* cmd, bool sweep_mode) {
        addopt(cmd, "--series", bench_args.series, "A or B");
        addopt(cmd, "--grid", bench_args.grid_text);
        addopt(cmd, "--n", bench_args.n);
        addopt(cmd, "--m", bench_args.m);
        addopt(cmd, "--caps", bench_args.caps_text, "comma-separated N_d list");
        addopt(cmd, "--noise", bench_args.noise_text, "comma-separated noise specs");
        addopt(cmd, "--methods", bench_args.methods_text);
        addopt(cmd, "--iterations", bench_args.iterations);
        addopt(cmd, "--speed-mean", bench_args.speed_mean);
        addopt(cmd, "--speed-std", bench_args.speed_std);
        addopt(cmd, "--p-min", bench_args.p_min);
        addopt(cmd, "--seed", bench_args.seed);
        addopt(cmd, "--jobs", bench_args.jobs);
        addopt(cmd, "--out", bench_args.out);
        if (sweep_mode) {
            addopt(cmd, "--sigmas", bench_args.sweep_text, "comma-separated noise scales")
                ->required();
        } else {
            addopt(cmd, "--sweep", bench_args.sweep_text,
                            "comma-separated noise scales; switches to a noise sweep");
        }
        addopt(cmd, "--sweep-kind", bench_args.sweep_kind);
        addopt(cmd, "--nd", bench_args.sweep_cap, "deployment cap for sweeps");
        cmd->add_option("--config", config_file, "flat key=value config file; flags override");
    };
    auto* bench = app.add_subcommand("bench", "reproduce series benchmarks (CSV + panels)");
    add_bench_options(bench, false);
    auto* sweep = app.add_subcommand("sweep", "noise sweep at a fixed deployment cap");
    add_bench_options(sweep, true);

    ReplayArgs replay_args;
    replay_args.seed = default_seed();
    auto* replay = app.add_subcommand("replay", "batched continuous assignment over a trace");
    addopt(replay, "--trace", replay_args.trace_path);
    addopt(replay, "--synthetic", replay_args.synthetic, "rate=0.5,hours=2");
    addopt(replay, "--grid", replay_args.grid_text);
    addopt(replay, "--graph", replay_args.graph_path);
    addopt(replay, "--policy", replay_args.policy, "redundant|non_redundant|both");
    addopt(replay, "--noise", replay_args.noise_text);
    addopt(replay, "--fleet-factor", replay_args.fleet_factor);
    addopt(replay, "--batch", replay_args.batch_s, "batch interval seconds");
    addopt(replay, "--drop-after", replay_args.drop_after_s, "drop age seconds");
    addopt(replay, "--p-min", replay_args.p_min);
    addopt(replay, "--min-gain", replay_args.min_gain_s,
                       "minimum expected saving (s) to deploy a redundant vehicle");
    addopt(replay, "--seed", replay_args.seed);
    addopt(replay, "--out", replay_args.out, "output prefix");
    replay->add_option("--config", config_file, "flat key=value config file; flags override");

    auto* gen_trace = app.add_subcommand("gen-trace", "write a synthetic request trace");
    CommonGraphArgs gt_source;
    double gt_rate = 0.5, gt_duration = 7200.0;
    std::uint64_t gt_seed = default_seed();
    std::string gt_out = "trace.csv";
    addopt(gen_trace, "--grid", gt_source.grid_text);
    addopt(gen_trace, "--graph", gt_source.graph_path);
    addopt(gen_trace, "--rate", gt_rate, "requests per second");
    addopt(gen_trace, "--duration-s", gt_duration);
    addopt(gen_trace, "--seed", gt_seed);
    addopt(gen_trace, "--out", gt_out);
    gen_trace->add_option("--config", config_file, "flat key=value config file; flags override");

    std::vector<std::string> tokens;
    try {
        tokens = expand_config_tokens(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::vector<const char*> cargv{argv[0]};
    for (const std::string& t : tokens) cargv.push_back(t.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 1;
    }

    try {
        if (gen_grid->parsed()) return run_gen_grid(grid_args, gen_grid_out);
        if (gen_inst->parsed())
            return run_gen_instance(gi_source, gi_n, gi_m, gi_cap, gi_noise, gi_pmin, gi_seed,
                                    gi_out);
        if (solve->parsed())
            return run_solve(solve_instance, solve_method, solve_with_optimal, solve_seed,
                             solve_out);
        if (bench->parsed()) return run_bench(bench_args, false);
        if (sweep->parsed()) return run_bench(bench_args, true);
        if (replay->parsed()) return run_replay(replay_args);
        if (gen_trace->parsed())
            return run_gen_trace(gt_source, gt_rate, gt_duration, gt_seed, gt_out);
    } catch (const rvrp::guard_error& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
