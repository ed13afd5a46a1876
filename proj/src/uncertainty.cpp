#include "rvrp/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rvrp {

NoiseSpec NoiseSpec::parse(const std::string& text) {
    NoiseSpec spec;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "none") {
        if (colon != std::string::npos) throw input_error("noise 'none' takes no scale");
        return spec;
    }
    if (colon == std::string::npos)
        throw input_error("noise spec '" + text + "' needs a scale, e.g. gaussian:100");
    try {
        spec.scale = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw input_error("bad noise scale in '" + text + "'");
    }
    if (spec.scale < 0.0 || !std::isfinite(spec.scale))
        throw input_error("noise scale must be >= 0 and finite");
    if (kind == "gaussian") spec.kind = NoiseKind::gaussian;
    else if (kind == "laplace") spec.kind = NoiseKind::laplace;
    else if (kind == "uniform") spec.kind = NoiseKind::circular_uniform;
    else throw input_error("unknown noise kind '" + kind + "'");
    return spec;
}

std::string NoiseSpec::str() const {
    if (kind == NoiseKind::none) return "none";
    const char* name = kind == NoiseKind::gaussian ? "gaussian"
                     : kind == NoiseKind::laplace  ? "laplace"
                                                   : "uniform";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%.17g", name, scale);
    return buf;
}

Point sample_reported_position(Point true_position, const NoiseSpec& noise, Rng& rng) {
    switch (noise.kind) {
        case NoiseKind::none:
            return true_position;
        case NoiseKind::gaussian:
            return {true_position.x + rng.normal(0.0, noise.scale),
                    true_position.y + rng.normal(0.0, noise.scale)};
        case NoiseKind::laplace:
            return {true_position.x + rng.laplace(noise.scale),
                    true_position.y + rng.laplace(noise.scale)};
        case NoiseKind::circular_uniform: {
            const auto [dx, dy] = rng.disk(noise.scale);
            return {true_position.x + dx, true_position.y + dy};
        }
    }
    return true_position;
}

PositionBelief node_belief(const TransportGraph& graph, Point reported, const NoiseSpec& noise,
                           double p_min, int robot_id) {
    if (p_min < 0.0 || p_min >= 1.0) throw input_error("p_min must lie in [0, 1)");

    PositionBelief belief;
    belief.robot_id = robot_id;

    if (noise.kind == NoiseKind::none || noise.scale == 0.0) {
        belief.support.emplace_back(graph.nearest_node(reported.x, reported.y), 1.0);
        return belief;
    }

    const int n = graph.node_count();
    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);

    if (noise.kind == NoiseKind::circular_uniform) {
        const double r2 = noise.scale * noise.scale;
        for (const GraphNode& nd : graph.nodes()) {
            const double dx = nd.x - reported.x, dy = nd.y - reported.y;
            weight[static_cast<std::size_t>(nd.id)] = (dx * dx + dy * dy <= r2) ? 1.0 : 0.0;
        }
    } else {
        // log-density up to constants, max-shifted before exponentiation so a
        // tight noise scale cannot underflow every node
        double max_lw = -std::numeric_limits<double>::infinity();
        std::vector<double> lw(static_cast<std::size_t>(n));
        for (const GraphNode& nd : graph.nodes()) {
            const double dx = nd.x - reported.x, dy = nd.y - reported.y;
            double v;
            if (noise.kind == NoiseKind::gaussian)
                v = -(dx * dx + dy * dy) / (2.0 * noise.scale * noise.scale);
            else
                v = -(std::abs(dx) + std::abs(dy)) / noise.scale;
            lw[static_cast<std::size_t>(nd.id)] = v;
            max_lw = std::max(max_lw, v);
        }
        for (int v = 0; v < n; ++v)
            weight[static_cast<std::size_t>(v)] = std::exp(lw[static_cast<std::size_t>(v)] - max_lw);
    }

    double total = 0.0;
    for (double w : weight) total += w;
    if (!(total > 0.0))
        throw degenerate_belief_error("no node carries probability mass for the reported position");

    double kept = 0.0;
    for (int v = 0; v < n; ++v) {
        const double p = weight[static_cast<std::size_t>(v)] / total;
        if (p > p_min) {
            belief.support.emplace_back(v, p);
            kept += p;
        }
    }
    if (belief.support.empty())
        throw degenerate_belief_error("belief support empty after p_min truncation");
    for (auto& [node, p] : belief.support) p /= kept;
    return belief;
}

double expected_cost(const PositionBelief& belief, const TravelTimeTable& table, int goal_index) {
    const double* f = table.row(goal_index);
    double sum = 0.0;
    for (const auto& [node, p] : belief.support) sum += p * f[node];
    return sum;
}

}  // namespace rvrp
