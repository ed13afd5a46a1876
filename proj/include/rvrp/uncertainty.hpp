#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rvrp/errors.hpp"
#include "rvrp/rng.hpp"
#include "rvrp/transport_graph.hpp"

namespace rvrp {

enum class NoiseKind { gaussian, laplace, circular_uniform, none };

/// Position noise model. `scale` is the std dev sigma for gaussian, the
/// per-axis scale b for laplace, and the radius R for circular_uniform.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double scale = 0.0;

    // "gaussian:100", "laplace:70.71", "uniform:200", "none"
    static NoiseSpec parse(const std::string& text);
    std::string str() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct degenerate_belief_error : input_error {
    using input_error::input_error;
};

/// Discrete probability mass of a robot's true node given its report.
struct PositionBelief {
    int robot_id = -1;
    std::vector<std::pair<int, double>> support;  // (node, probability), node ascending
};

Point sample_reported_position(Point true_position, const NoiseSpec& noise, Rng& rng);

/// Reverse pmf over graph nodes: forward density evaluated at node coordinates
/// relative to the report, normalized, truncated at p_min, renormalized.
/// kind=none (or scale 0) yields a point mass at the nearest node.
PositionBelief node_belief(const TransportGraph& graph, Point reported, const NoiseSpec& noise,
                           double p_min, int robot_id = -1);

/// sum_v P(v) * f(v, goal)
double expected_cost(const PositionBelief& belief, const TravelTimeTable& table, int goal_index);

}  // namespace rvrp
