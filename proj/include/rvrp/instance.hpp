#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvrp/errors.hpp"
#include "rvrp/transport_graph.hpp"
#include "rvrp/uncertainty.hpp"

namespace rvrp {

struct Edge {
    int robot = -1;
    int goal = -1;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Set of robot-to-goal edges; each robot appears in at most one edge.
struct Assignment {
    std::vector<Edge> edges;

    bool contains(Edge e) const;
    bool uses_robot(int robot) const;
    void add(Edge e);  // constraint_error if the robot is already used
    std::size_t size() const { return edges.size(); }
    bool empty() const { return edges.empty(); }
};

/// The static bipartite problem: robots with uncertain positions, goals,
/// travel-time table, deployment cap.
struct AssignmentInstance {
    int deployment_cap = 0;               // N_d with M <= N_d <= N
    std::vector<PositionBelief> beliefs;  // one per robot, index = robot
    TravelTimeTable table;
    std::vector<int> goal_nodes;          // node per goal, index = goal
    std::vector<int> true_nodes;          // optional; outcome evaluation only, never read by solvers

    int n_robots() const { return static_cast<int>(beliefs.size()); }
    int n_goals() const { return static_cast<int>(goal_nodes.size()); }
    bool has_true_nodes() const { return !true_nodes.empty(); }
    void validate() const;
};

/// Samples reported positions (true + noise), discretizes beliefs, and
/// computes the travel table for the given goals. true nodes are retained for
/// outcome evaluation.
AssignmentInstance build_instance(const TransportGraph& graph, const std::vector<int>& goal_nodes,
                                  const std::vector<int>& true_robot_nodes, const NoiseSpec& noise,
                                  int deployment_cap, double p_min, std::uint64_t rng_seed);

/// matrix[goal][robot] of expected travel costs
std::vector<std::vector<double>> expected_cost_matrix(const AssignmentInstance& inst);

/// The set O: perfect matching covering all goals, minimizing total expected
/// cost (rectangular Hungarian). Deterministic tie-breaking.
Assignment initial_assignment(const AssignmentInstance& inst);

/// Self-contained, replayable description of an instance ("rvrp-instance v1").
struct InstanceSpec {
    // exactly one of graph_path / grid is set
    std::string graph_path;
    int grid_rows = 0, grid_cols = 0;
    double grid_spacing = 0.0, grid_speed = 0.0;

    std::vector<int> goal_nodes;
    std::vector<int> robot_nodes;  // true positions
    NoiseSpec noise;
    double p_min = 1e-6;
    int deployment_cap = 0;
    std::uint64_t seed = 0;

    bool uses_grid() const { return grid_rows > 0; }
};

void save_instance_spec(const InstanceSpec& spec, const std::string& path);
InstanceSpec load_instance_spec(const std::string& path);

/// Builds the referenced graph; relative graph paths resolve against base_dir.
TransportGraph realize_graph(const InstanceSpec& spec, const std::string& base_dir);
AssignmentInstance realize_instance(const InstanceSpec& spec, const TransportGraph& graph);

}  // namespace rvrp
