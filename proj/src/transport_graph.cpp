#include "rvrp/transport_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace rvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reachability sweep over one CSR direction; returns visit marks.
std::vector<char> sweep(int n, const std::vector<int>& start, const std::vector<int>& edge_index,
                        const std::vector<GraphEdge>& edges, bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int k = start[u]; k < start[u + 1]; ++k) {
            const GraphEdge& e = edges[static_cast<std::size_t>(edge_index[static_cast<std::size_t>(k)])];
            const int v = forward ? e.to : e.from;
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

void build_csr(int n, const std::vector<GraphEdge>& edges, bool by_from,
               std::vector<int>& start, std::vector<int>& edge_index) {
    start.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const GraphEdge& e : edges) ++start[static_cast<std::size_t>((by_from ? e.from : e.to)) + 1];
    for (int i = 0; i < n; ++i) start[static_cast<std::size_t>(i) + 1] += start[static_cast<std::size_t>(i)];
    edge_index.resize(edges.size());
    std::vector<int> cursor(start.begin(), start.end() - 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const int key = by_from ? edges[k].from : edges[k].to;
        edge_index[static_cast<std::size_t>(cursor[static_cast<std::size_t>(key)]++)] = static_cast<int>(k);
    }
}

}  // namespace

TransportGraph::TransportGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    validate_and_index();
}

void TransportGraph::validate_and_index() {
    const int n = node_count();
    if (n == 0) throw validation_error("graph has no nodes");

    std::vector<char> seen_id(static_cast<std::size_t>(n), 0);
    for (const GraphNode& nd : nodes_) {
        if (nd.id < 0 || nd.id >= n)
            throw validation_error("node id " + std::to_string(nd.id) + " outside dense range 0.." +
                                   std::to_string(n - 1));
        if (seen_id[static_cast<std::size_t>(nd.id)])
            throw validation_error("duplicate node id " + std::to_string(nd.id));
        seen_id[static_cast<std::size_t>(nd.id)] = 1;
    }
    // store nodes indexed by id
    std::vector<GraphNode> by_id(static_cast<std::size_t>(n));
    for (const GraphNode& nd : nodes_) by_id[static_cast<std::size_t>(nd.id)] = nd;
    nodes_ = std::move(by_id);

    for (const GraphEdge& e : edges_) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw validation_error("edge references unknown node id " +
                                   std::to_string(e.from < 0 || e.from >= n ? e.from : e.to));
        if (!(e.travel_time > 0.0) || !std::isfinite(e.travel_time))
            throw validation_error("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                   " has non-positive or non-finite travel time");
    }

    build_csr(n, edges_, true, out_start_, out_edge_);
    build_csr(n, edges_, false, in_start_, in_edge_);

    const std::vector<char> fwd = sweep(n, out_start_, out_edge_, edges_, true);
    const std::vector<char> bwd = sweep(n, in_start_, in_edge_, edges_, false);
    for (int v = 0; v < n; ++v) {
        if (!fwd[static_cast<std::size_t>(v)])
            throw validation_error("graph not strongly connected: no path from node 0 to node " +
                                   std::to_string(v));
        if (!bwd[static_cast<std::size_t>(v)])
            throw validation_error("graph not strongly connected: no path from node " +
                                   std::to_string(v) + " to node 0");
    }
}

int TransportGraph::nearest_node(double x, double y) const {
    int best = 0;
    double best_d2 = kInf;
    for (const GraphNode& nd : nodes_) {
        const double dx = nd.x - x, dy = nd.y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = nd.id;
        }
    }
    return best;
}

TransportGraph build_grid(int rows, int cols, double spacing_m, double nominal_speed_mps) {
    if (rows < 2 || cols < 2) throw input_error("grid needs rows >= 2 and cols >= 2");
    if (!(spacing_m > 0.0)) throw input_error("grid spacing must be > 0");
    if (!(nominal_speed_mps > 0.0)) throw input_error("nominal speed must be > 0");

    const double step_s = spacing_m / nominal_speed_mps;
    std::vector<GraphNode> nodes;
    nodes.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            nodes.push_back({r * cols + c, c * spacing_m, r * spacing_m});

    std::vector<GraphEdge> edges;
    edges.reserve(4 * nodes.size());
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                edges.push_back({id(r, c), id(r, c + 1), step_s});
                edges.push_back({id(r, c + 1), id(r, c), step_s});
            }
            if (r + 1 < rows) {
                edges.push_back({id(r, c), id(r + 1, c), step_s});
                edges.push_back({id(r + 1, c), id(r, c), step_s});
            }
        }
    }
    return TransportGraph(std::move(nodes), std::move(edges));
}

TransportGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open graph file: " + path);

    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;  // blank/comment line
        if (kind == "node") {
            GraphNode nd;
            if (!(ls >> nd.id >> nd.x >> nd.y))
                throw parse_error(path, line_no, "expected: node <id> <x_meters> <y_meters>");
            nodes.push_back(nd);
        } else if (kind == "edge") {
            GraphEdge e;
            if (!(ls >> e.from >> e.to >> e.travel_time))
                throw parse_error(path, line_no, "expected: edge <from> <to> <seconds>");
            if (!(e.travel_time > 0.0))
                throw parse_error(path, line_no, "edge travel time must be > 0");
            edges.push_back(e);
        } else {
            throw parse_error(path, line_no, "unknown record '" + kind + "'");
        }
        std::string extra;
        if (ls >> extra) throw parse_error(path, line_no, "trailing tokens after record");
    }
    if (nodes.empty()) throw parse_error(path, line_no, "graph file declares no nodes");
    return TransportGraph(std::move(nodes), std::move(edges));
}

void save_graph(const TransportGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write graph file: " + path);
    char buf[128];
    for (const GraphNode& nd : graph.nodes()) {
        std::snprintf(buf, sizeof buf, "node %d %.17g %.17g\n", nd.id, nd.x, nd.y);
        out << buf;
    }
    for (const GraphEdge& e : graph.edges()) {
        std::snprintf(buf, sizeof buf, "edge %d %d %.17g\n", e.from, e.to, e.travel_time);
        out << buf;
    }
}

TravelTimeTable shortest_travel_times(const TransportGraph& graph, const std::vector<int>& goals) {
    const int n = graph.node_count();
    for (int g : goals)
        if (g < 0 || g >= n) throw input_error("goal node " + std::to_string(g) + " not in graph");

    TravelTimeTable table;
    table.goal_ids = goals;
    table.node_count = n;
    table.times.assign(goals.size() * static_cast<std::size_t>(n), kInf);

    const auto& in_start = graph.in_offsets();
    const auto& in_edge = graph.in_edge_indices();
    const auto& edges = graph.edges();

    using Item = std::pair<double, int>;
    for (std::size_t gi = 0; gi < goals.size(); ++gi) {
        double* dist = table.times.data() + gi * static_cast<std::size_t>(n);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[goals[gi]] = 0.0;
        heap.emplace(0.0, goals[gi]);
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (int k = in_start[static_cast<std::size_t>(u)];
                 k < in_start[static_cast<std::size_t>(u) + 1]; ++k) {
                const GraphEdge& e = edges[static_cast<std::size_t>(in_edge[static_cast<std::size_t>(k)])];
                const double nd = d + e.travel_time;  // original edge e.from -> u
                if (nd < dist[e.from]) {
                    dist[e.from] = nd;
                    heap.emplace(nd, e.from);
                }
            }
        }
    }
    return table;
}

std::vector<int> canonical_path(const TransportGraph& graph, const TravelTimeTable& table,
                                int goal_index, int node) {
    const double* dist = table.row(goal_index);
    const auto& out_start = graph.out_offsets();
    const auto& out_edge = graph.out_edge_indices();
    const auto& edges = graph.edges();
    const int goal_node = table.goal_ids[static_cast<std::size_t>(goal_index)];

    std::vector<int> path{node};
    int u = node;
    while (u != goal_node) {
        int best_next = -1;
        double best_val = kInf;
        for (int k = out_start[static_cast<std::size_t>(u)];
             k < out_start[static_cast<std::size_t>(u) + 1]; ++k) {
            const GraphEdge& e = edges[static_cast<std::size_t>(out_edge[static_cast<std::size_t>(k)])];
            const double val = e.travel_time + dist[e.to];
            if (val < best_val || (val == best_val && e.to < best_next)) {
                best_val = val;
                best_next = e.to;
            }
        }
        path.push_back(best_next);
        u = best_next;
    }
    return path;
}

int position_along_path(const TransportGraph& graph, const TravelTimeTable& table,
                        int goal_index, int node, double elapsed_s) {
    const double* dist = table.row(goal_index);
    const std::vector<int> path = canonical_path(graph, table, goal_index, node);
    // dist decreases strictly along the path; node k has been fully reached
    // once elapsed >= dist[start] - dist[k]
    const double start = dist[node];
    int reached = node;
    for (int v : path) {
        if (start - dist[v] <= elapsed_s) reached = v;
        else break;
    }
    return reached;
}

}  // namespace rvrp
