#include "rvrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rvrp/hungarian.hpp"
#include "rvrp/rng.hpp"

namespace rvrp {

bool Assignment::contains(Edge e) const {
    return std::find(edges.begin(), edges.end(), e) != edges.end();
}

bool Assignment::uses_robot(int robot) const {
    for (const Edge& e : edges)
        if (e.robot == robot) return true;
    return false;
}

void Assignment::add(Edge e) {
    if (uses_robot(e.robot))
        throw constraint_error("robot " + std::to_string(e.robot) + " already assigned");
    edges.push_back(e);
}

void AssignmentInstance::validate() const {
    const int n = n_robots(), m = n_goals();
    if (m < 1) throw input_error("instance needs at least one goal");
    if (!(m <= deployment_cap && deployment_cap <= n))
        throw input_error("deployment cap " + std::to_string(deployment_cap) +
                          " violates M <= N_d <= N (M=" + std::to_string(m) +
                          ", N=" + std::to_string(n) + ")");
    if (table.goal_count() != m) throw input_error("travel table does not match goal list");
    for (int g : goal_nodes)
        if (g < 0 || g >= table.node_count) throw input_error("goal node out of range");
    for (const PositionBelief& b : beliefs) {
        if (b.support.empty()) throw input_error("robot belief with empty support");
        double sum = 0.0;
        int prev = -1;
        for (const auto& [node, p] : b.support) {
            if (node < 0 || node >= table.node_count)
                throw input_error("belief support node out of range");
            if (node <= prev) throw input_error("belief support must be strictly node-ascending");
            prev = node;
            if (!(p > 0.0)) throw input_error("belief probability must be > 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw input_error("belief probabilities must sum to 1");
    }
    if (!true_nodes.empty() && static_cast<int>(true_nodes.size()) != n)
        throw input_error("true_nodes must be empty or one per robot");
}

AssignmentInstance build_instance(const TransportGraph& graph, const std::vector<int>& goal_nodes,
                                  const std::vector<int>& true_robot_nodes, const NoiseSpec& noise,
                                  int deployment_cap, double p_min, std::uint64_t rng_seed) {
    AssignmentInstance inst;
    inst.deployment_cap = deployment_cap;
    inst.goal_nodes = goal_nodes;
    inst.true_nodes = true_robot_nodes;
    inst.table = shortest_travel_times(graph, goal_nodes);

    Rng rng(rng_seed);
    inst.beliefs.reserve(true_robot_nodes.size());
    for (std::size_t i = 0; i < true_robot_nodes.size(); ++i) {
        const GraphNode& nd = graph.node(true_robot_nodes[i]);
        const Point reported = sample_reported_position({nd.x, nd.y}, noise, rng);
        inst.beliefs.push_back(node_belief(graph, reported, noise, p_min, static_cast<int>(i)));
    }
    inst.validate();
    return inst;
}

std::vector<std::vector<double>> expected_cost_matrix(const AssignmentInstance& inst) {
    const int n = inst.n_robots(), m = inst.n_goals();
    std::vector<std::vector<double>> cost(m, std::vector<double>(n));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) cost[j][i] = expected_cost(inst.beliefs[i], inst.table, j);
    return cost;
}

Assignment initial_assignment(const AssignmentInstance& inst) {
    const HungarianResult hung = hungarian_min_cost(expected_cost_matrix(inst));
    Assignment o;
    for (int j = 0; j < inst.n_goals(); ++j) o.add({hung.col_of_row[j], j});
    return o;
}

void save_instance_spec(const InstanceSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write instance file: " + path);
    char buf[160];
    out << "rvrp-instance v1\n";
    if (spec.uses_grid()) {
        std::snprintf(buf, sizeof buf, "grid %d %d %.17g %.17g\n", spec.grid_rows, spec.grid_cols,
                      spec.grid_spacing, spec.grid_speed);
        out << buf;
    } else {
        out << "graph " << spec.graph_path << "\n";
    }
    out << "noise " << spec.noise.str() << "\n";
    std::snprintf(buf, sizeof buf, "p_min %.17g\n", spec.p_min);
    out << buf;
    out << "cap " << spec.deployment_cap << "\n";
    out << "seed " << spec.seed << "\n";
    for (int g : spec.goal_nodes) out << "goal " << g << "\n";
    for (int r : spec.robot_nodes) out << "robot " << r << "\n";
}

InstanceSpec load_instance_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open instance file: " + path);

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || line != "rvrp-instance v1")
        throw parse_error(path, 1, "expected header 'rvrp-instance v1'");
    line_no = 1;

    InstanceSpec spec;
    bool have_source = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        bool ok = true;
        if (key == "grid") {
            ok = static_cast<bool>(ls >> spec.grid_rows >> spec.grid_cols >> spec.grid_spacing >>
                                   spec.grid_speed);
            have_source = true;
        } else if (key == "graph") {
            ok = static_cast<bool>(ls >> spec.graph_path);
            have_source = true;
        } else if (key == "noise") {
            std::string text;
            ok = static_cast<bool>(ls >> text);
            if (ok) spec.noise = NoiseSpec::parse(text);
        } else if (key == "p_min") {
            ok = static_cast<bool>(ls >> spec.p_min);
        } else if (key == "cap") {
            ok = static_cast<bool>(ls >> spec.deployment_cap);
        } else if (key == "seed") {
            ok = static_cast<bool>(ls >> spec.seed);
        } else if (key == "goal") {
            int g;
            ok = static_cast<bool>(ls >> g);
            if (ok) spec.goal_nodes.push_back(g);
        } else if (key == "robot") {
            int r;
            ok = static_cast<bool>(ls >> r);
            if (ok) spec.robot_nodes.push_back(r);
        } else {
            throw parse_error(path, line_no, "unknown record '" + key + "'");
        }
        if (!ok) throw parse_error(path, line_no, "malformed '" + key + "' record");
    }
    if (!have_source) throw parse_error(path, line_no, "instance needs a 'grid' or 'graph' record");
    if (spec.goal_nodes.empty()) throw parse_error(path, line_no, "instance declares no goals");
    if (spec.robot_nodes.empty()) throw parse_error(path, line_no, "instance declares no robots");
    return spec;
}

TransportGraph realize_graph(const InstanceSpec& spec, const std::string& base_dir) {
    if (spec.uses_grid())
        return build_grid(spec.grid_rows, spec.grid_cols, spec.grid_spacing, spec.grid_speed);
    std::filesystem::path p(spec.graph_path);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return load_graph(p.string());
}

AssignmentInstance realize_instance(const InstanceSpec& spec, const TransportGraph& graph) {
    return build_instance(graph, spec.goal_nodes, spec.robot_nodes, spec.noise,
                          spec.deployment_cap, spec.p_min, spec.seed);
}

}  // namespace rvrp
