#pragma once

#include <string>
#include <vector>

#include "rvrp/errors.hpp"

namespace rvrp {

struct GraphNode {
    int id = 0;
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

struct GraphEdge {
    int from = 0;
    int to = 0;
    double travel_time = 0.0;  // seconds, > 0
};

/// Strongly connected weighted digraph with planar node coordinates.
/// Immutable after construction; safe to share read-only across threads.
class TransportGraph {
public:
    TransportGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const GraphNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }

    // CSR adjacency: indices into edges() for the outgoing/incoming edges of a node
    const std::vector<int>& out_offsets() const { return out_start_; }
    const std::vector<int>& out_edge_indices() const { return out_edge_; }
    const std::vector<int>& in_offsets() const { return in_start_; }
    const std::vector<int>& in_edge_indices() const { return in_edge_; }

    int nearest_node(double x, double y) const;  // Euclidean, lowest id on ties

private:
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
    std::vector<int> out_start_, out_edge_;
    std::vector<int> in_start_, in_edge_;

    void validate_and_index();
};

/// Deterministic travel times f(node, goal) for a fixed goal list.
struct TravelTimeTable {
    std::vector<int> goal_ids;  // goal node per goal index
    int node_count = 0;
    std::vector<double> times;  // goal-major: times[g * node_count + v] = f(v, goal g)

    int goal_count() const { return static_cast<int>(goal_ids.size()); }
    const double* row(int goal_index) const {
        return times.data() + static_cast<std::size_t>(goal_index) * static_cast<std::size_t>(node_count);
    }
    double at(int goal_index, int node) const { return row(goal_index)[node]; }
};

/// 4-connected bidirectional grid; every edge takes spacing / nominal_speed seconds.
TransportGraph build_grid(int rows, int cols, double spacing_m, double nominal_speed_mps);

/// Text format, one record per line:
///   node <id> <x_meters> <y_meters>
///   edge <from> <to> <seconds>
/// '#' starts a comment. Ids must be dense 0..|V|-1.
TransportGraph load_graph(const std::string& path);
void save_graph(const TransportGraph& graph, const std::string& path);

/// times[g][v] = minimum travel time from v to goal g, one Dijkstra per goal
/// on the edge-reversed graph.
TravelTimeTable shortest_travel_times(const TransportGraph& graph, const std::vector<int>& goals);

/// One canonical shortest path node -> goal, successor chosen with
/// lowest-node-id tie breaking. Includes both endpoints.
std::vector<int> canonical_path(const TransportGraph& graph, const TravelTimeTable& table,
                                int goal_index, int node);

/// Node reached after `elapsed` seconds along the canonical path, snapped to
/// the last fully traversed node.
int position_along_path(const TransportGraph& graph, const TravelTimeTable& table,
                        int goal_index, int node, double elapsed_s);

}  // namespace rvrp
