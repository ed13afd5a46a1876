#include "rvrp/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "rvrp/objective.hpp"
#include "rvrp/rng.hpp"

namespace rvrp {

const char* policy_name(DispatchPolicy policy) {
    return policy == DispatchPolicy::redundant ? "redundant" : "non_redundant";
}

DispatchPolicy parse_policy(const std::string& name) {
    if (name == "redundant") return DispatchPolicy::redundant;
    if (name == "non_redundant") return DispatchPolicy::non_redundant;
    throw input_error("unknown policy '" + name + "'");
}

RequestTrace load_trace(const std::string& path, const TransportGraph& graph) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("request_time_s,pickup_node,dropoff_node", 0) != 0)
        throw parse_error(path, 1, "expected header request_time_s,pickup_node,dropoff_node");

    RequestTrace trace;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Request r;
        char comma1, comma2;
        std::istringstream ls(line);
        if (!(ls >> r.time_s >> comma1 >> r.pickup >> comma2 >> r.dropoff) || comma1 != ',' ||
            comma2 != ',')
            throw parse_error(path, line_no, "expected <time>,<pickup>,<dropoff>");
        if (r.time_s < 0.0) throw parse_error(path, line_no, "negative request time");
        if (r.pickup < 0 || r.pickup >= graph.node_count() || r.dropoff < 0 ||
            r.dropoff >= graph.node_count())
            throw parse_error(path, line_no, "node id not in graph");
        trace.events.push_back(r);
    }
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Request& a, const Request& b) { return a.time_s < b.time_s; });
    return trace;
}

void save_trace(const RequestTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write trace file: " + path);
    out << "request_time_s,pickup_node,dropoff_node\n";
    char buf[96];
    for (const Request& r : trace.events) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d\n", r.time_s, r.pickup, r.dropoff);
        out << buf;
    }
}

RequestTrace generate_synthetic_trace(const TransportGraph& graph, double rate_per_s,
                                      double duration_s, std::uint64_t seed) {
    if (!(rate_per_s > 0.0)) throw input_error("arrival rate must be > 0");
    if (duration_s < 0.0) throw input_error("duration must be >= 0");
    Rng rng(seed);
    RequestTrace trace;
    double t = rng.exponential(rate_per_s);
    while (t <= duration_s) {
        Request r;
        r.time_s = t;
        r.pickup = static_cast<int>(rng.uniform_int(0, graph.node_count() - 1));
        do {
            r.dropoff = static_cast<int>(rng.uniform_int(0, graph.node_count() - 1));
        } while (r.dropoff == r.pickup);
        trace.events.push_back(r);
        t += rng.exponential(rate_per_s);
    }
    return trace;
}

namespace {

// Redundant edges for one batch: greedy by marginal decrease, stopping once no
// eligible edge buys a positive expected gain. Deploying a vehicle with zero
// expected gain only burns future supply, so the replay does not fill the cap
// for its own sake (the static greedy solver does).
Assignment batch_redundant_edges(const AssignmentInstance& inst, const Assignment& initial,
                                 double min_gain) {
    ObjectiveCache cache(inst, initial);
    const int budget = inst.deployment_cap - inst.n_goals();
    for (int step = 0; step < budget; ++step) {
        Edge best{-1, -1};
        double best_delta = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < inst.n_robots(); ++i) {
            if (cache.robot_assigned(i)) continue;
            for (int j = 0; j < inst.n_goals(); ++j) {
                const double delta = cache.marginal_decrease({i, j});
                if (delta > best_delta) {
                    best_delta = delta;
                    best = {i, j};
                }
            }
        }
        if (best.robot < 0 || best_delta <= min_gain) break;
        cache.commit(best);
    }
    return cache.committed();
}

enum class VehicleStatus { idle, assigned, occupied };

struct Vehicle {
    int id = 0;
    int node = 0;
    VehicleStatus status = VehicleStatus::idle;
    bool alive = true;
};

struct VehicleEvent {
    double time = 0.0;
    long seq = 0;
    int vehicle = 0;
    int node = 0;  // location at the transition
    VehicleStatus from = VehicleStatus::assigned;
    VehicleStatus to = VehicleStatus::idle;
};

struct EventLater {
    bool operator()(const VehicleEvent& a, const VehicleEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

void require(bool condition, const char* what) {
    if (!condition) throw std::logic_error(std::string("dispatch invariant violated: ") + what);
}

}  // namespace

DispatchStats replay(const TransportGraph& graph, const RequestTrace& trace,
                     const ReplayParams& params) {
    if (params.fleet_factor < 1.0) throw input_error("fleet factor must be >= 1");
    for (std::size_t i = 1; i < trace.events.size(); ++i)
        if (trace.events[i].time_s < trace.events[i - 1].time_s)
            throw input_error("trace is not sorted by request time");
    for (const Request& r : trace.events)
        if (r.pickup < 0 || r.pickup >= graph.node_count() || r.dropoff < 0 ||
            r.dropoff >= graph.node_count())
            throw input_error("trace references a node outside the graph");

    // Trip durations f(pickup, dropoff), one Dijkstra per distinct dropoff.
    std::vector<double> trip_duration(trace.events.size(), 0.0);
    {
        std::vector<std::vector<std::size_t>> by_dropoff;
        std::vector<int> dropoffs;
        std::vector<int> slot(graph.node_count(), -1);
        for (std::size_t i = 0; i < trace.events.size(); ++i) {
            const int d = trace.events[i].dropoff;
            if (slot[d] < 0) {
                slot[d] = static_cast<int>(dropoffs.size());
                dropoffs.push_back(d);
                by_dropoff.emplace_back();
            }
            by_dropoff[slot[d]].push_back(i);
        }
        for (std::size_t k = 0; k < dropoffs.size(); ++k) {
            const TravelTimeTable t = shortest_travel_times(graph, {dropoffs[k]});
            for (std::size_t i : by_dropoff[k])
                trip_duration[i] = t.at(0, trace.events[i].pickup);
        }
    }

    // Occupied-trip reference from the trace: trips in progress at time t.
    std::vector<double> trip_starts, trip_ends;
    trip_starts.reserve(trace.events.size());
    trip_ends.reserve(trace.events.size());
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        trip_starts.push_back(trace.events[i].time_s);
        trip_ends.push_back(trace.events[i].time_s + trip_duration[i]);
    }
    std::sort(trip_ends.begin(), trip_ends.end());
    auto occupied_reference = [&](double t) {
        const auto started = std::upper_bound(trip_starts.begin(), trip_starts.end(), t) -
                             trip_starts.begin();
        const auto ended = std::upper_bound(trip_ends.begin(), trip_ends.end(), t) -
                           trip_ends.begin();
        return static_cast<int>(started - ended);
    };

    Rng rng(params.seed);
    std::vector<Vehicle> fleet;
    std::priority_queue<VehicleEvent, std::vector<VehicleEvent>, EventLater> events;
    long event_seq = 0;

    DispatchStats stats;
    stats.total_requests = static_cast<int>(trace.events.size());
    std::deque<std::size_t> pending;  // indices into trace.events, oldest first
    std::size_t next_arrival = 0;
    int arrived = 0;

    const double batch_s = params.batch_interval_s;
    int batch_index = 0;
    while (next_arrival < trace.events.size() || !pending.empty()) {
        const double now = batch_index * batch_s;

        // vehicle transitions due by now
        while (!events.empty() && events.top().time <= now) {
            const VehicleEvent ev = events.top();
            events.pop();
            Vehicle& v = fleet[ev.vehicle];
            require(v.status == ev.from, "vehicle transition from unexpected status");
            v.status = ev.to;
            v.node = ev.node;
        }

        // new arrivals, then age-based drops
        while (next_arrival < trace.events.size() &&
               trace.events[next_arrival].time_s <= now) {
            pending.push_back(next_arrival++);
            ++arrived;
        }
        while (!pending.empty() &&
               now - trace.events[pending.front()].time_s > params.drop_after_s) {
            pending.pop_front();
            ++stats.dropped;
        }
        // ages are non-increasing along the deque, so only the front can expire
        for (std::size_t idx : pending)
            require(now - trace.events[idx].time_s <= params.drop_after_s, "stale pending request");

        // fleet resizing against the trace-reported occupied count
        const int target = static_cast<int>(
            std::ceil(params.fleet_factor * static_cast<double>(occupied_reference(now))));
        int alive = 0;
        for (const Vehicle& v : fleet) alive += v.alive ? 1 : 0;
        if (alive < target) {
            for (int k = alive; k < target; ++k) {
                Vehicle v;
                v.id = static_cast<int>(fleet.size());
                v.node = static_cast<int>(rng.uniform_int(0, graph.node_count() - 1));
                fleet.push_back(v);
            }
        } else if (alive > target) {
            int surplus = alive - target;
            for (auto it = fleet.rbegin(); it != fleet.rend() && surplus > 0; ++it) {
                if (it->alive && it->status == VehicleStatus::idle) {
                    it->alive = false;
                    --surplus;
                }
            }
        }

        // assignment
        std::vector<int> idle;
        for (const Vehicle& v : fleet)
            if (v.alive && v.status == VehicleStatus::idle) idle.push_back(v.id);

        const int n_idle = static_cast<int>(idle.size());
        const int n_pending = static_cast<int>(pending.size());
        const int m_batch = std::min(n_pending, n_idle);
        int serviced_this_batch = 0;
        double wait_sum = 0.0;

        if (m_batch > 0) {
            const int reserve = static_cast<int>(std::ceil(0.5 * n_pending));
            int cap = std::max(m_batch, n_idle - reserve);
            if (params.policy == DispatchPolicy::non_redundant) cap = m_batch;

            std::vector<std::size_t> covered(pending.begin(), pending.begin() + m_batch);
            std::vector<int> pickups;
            for (std::size_t idx : covered) pickups.push_back(trace.events[idx].pickup);

            AssignmentInstance inst;
            inst.deployment_cap = cap;
            inst.goal_nodes = pickups;
            inst.table = shortest_travel_times(graph, pickups);
            inst.beliefs.reserve(idle.size());
            std::vector<int> true_nodes;
            for (std::size_t r = 0; r < idle.size(); ++r) {
                const Vehicle& v = fleet[idle[r]];
                require(v.status == VehicleStatus::idle, "non-idle vehicle offered for assignment");
                true_nodes.push_back(v.node);
                const GraphNode& nd = graph.node(v.node);
                const Point reported = sample_reported_position({nd.x, nd.y}, params.noise, rng);
                inst.beliefs.push_back(
                    node_belief(graph, reported, params.noise, params.p_min, static_cast<int>(r)));
            }
            inst.true_nodes = true_nodes;

            const Assignment initial = initial_assignment(inst);
            Assignment redundant;
            if (params.policy == DispatchPolicy::redundant && cap > m_batch)
                redundant = batch_redundant_edges(inst, initial, params.min_hedge_gain_s);

            // robots assigned per goal, ascending robot index
            std::vector<std::vector<int>> group(m_batch);
            for (const Edge& e : initial.edges) group[e.goal].push_back(e.robot);
            for (const Edge& e : redundant.edges) group[e.goal].push_back(e.robot);
            for (auto& g : group) std::sort(g.begin(), g.end());

            for (int j = 0; j < m_batch; ++j) {
                const Request& req = trace.events[covered[j]];
                int winner = -1;
                double best = std::numeric_limits<double>::infinity();
                for (int r : group[j]) {
                    const double t = inst.table.at(j, true_nodes[r]);
                    if (t < best) {
                        best = t;
                        winner = r;
                    }
                }
                const double pickup_arrival = now + best;
                const double wait = (now - req.time_s) + best;

                ServicedRequest record;
                record.request_time_s = req.time_s;
                record.wait_s = wait;
                record.batch_index = batch_index;
                record.vehicles_assigned = static_cast<int>(group[j].size());
                stats.serviced.push_back(record);
                wait_sum += wait;
                ++serviced_this_batch;

                for (int r : group[j]) {
                    Vehicle& v = fleet[idle[r]];
                    v.status = VehicleStatus::assigned;
                    if (r == winner) {
                        events.push({pickup_arrival, event_seq++, v.id, req.pickup,
                                     VehicleStatus::assigned, VehicleStatus::occupied});
                        events.push({pickup_arrival + trip_duration[covered[j]], event_seq++, v.id,
                                     req.dropoff, VehicleStatus::occupied, VehicleStatus::idle});
                    } else {
                        // released in place along its canonical path at the
                        // winner's pickup time
                        const int release_node =
                            position_along_path(graph, inst.table, j, true_nodes[r], best);
                        events.push({pickup_arrival, event_seq++, v.id, release_node,
                                     VehicleStatus::assigned, VehicleStatus::idle});
                    }
                }
            }
            pending.erase(pending.begin(), pending.begin() + m_batch);
        }

        // batch accounting and invariants
        int non_idle = 0, alive_now = 0;
        for (const Vehicle& v : fleet) {
            if (!v.alive) {
                require(v.status == VehicleStatus::idle, "non-idle vehicle removed from fleet");
                continue;
            }
            ++alive_now;
            non_idle += v.status != VehicleStatus::idle ? 1 : 0;
        }
        const double ratio = alive_now > 0 ? static_cast<double>(non_idle) / alive_now : 0.0;
        require(ratio >= 0.0 && ratio <= 1.0, "occupation ratio outside [0,1]");
        require(static_cast<int>(stats.serviced.size()) + stats.dropped +
                        static_cast<int>(pending.size()) ==
                    arrived,
                "serviced + dropped + pending != arrived");

        BatchRecord batch;
        batch.index = batch_index;
        batch.time_s = now;
        batch.occupation_ratio = ratio;
        batch.mean_wait_s = serviced_this_batch > 0 ? wait_sum / serviced_this_batch : 0.0;
        batch.serviced = serviced_this_batch;
        batch.pending_after = static_cast<int>(pending.size());
        batch.dropped_total = stats.dropped;
        stats.batches.push_back(batch);

        ++batch_index;
    }

    require(static_cast<int>(stats.serviced.size()) + stats.dropped == stats.total_requests,
            "final conservation check failed");
    return stats;
}

StatsSummary summarize(const DispatchStats& stats) {
    StatsSummary s;
    s.serviced = static_cast<int>(stats.serviced.size());
    s.dropped = stats.dropped;
    s.total = stats.total_requests;
    s.drop_rate = s.total > 0 ? static_cast<double>(s.dropped) / s.total : 0.0;
    if (stats.serviced.empty()) return s;  // explicit empty marker
    s.empty = false;

    std::vector<double> waits;
    waits.reserve(stats.serviced.size());
    double redundancy_sum = 0.0;
    for (const ServicedRequest& r : stats.serviced) {
        waits.push_back(r.wait_s);
        redundancy_sum += r.vehicles_assigned;
    }
    s.mean_redundancy = redundancy_sum / s.serviced;

    double sum = 0.0;
    for (double w : waits) sum += w;
    s.mean_s = sum / s.serviced;
    double var = 0.0;
    for (double w : waits) var += (w - s.mean_s) * (w - s.mean_s);
    s.std_s = std::sqrt(var / s.serviced);  // population

    std::sort(waits.begin(), waits.end());
    const std::size_t n = waits.size();
    s.median_s = n % 2 == 1 ? waits[n / 2] : 0.5 * (waits[n / 2 - 1] + waits[n / 2]);
    const std::size_t p95_idx =
        std::min(n - 1, static_cast<std::size_t>(std::floor(0.95 * static_cast<double>(n))));
    s.p95_s = waits[p95_idx];

    for (const BatchRecord& b : stats.batches)
        if (b.serviced > 0) s.batch_density.emplace_back(b.occupation_ratio, b.mean_wait_s);
    return s;
}

void write_request_csv(const DispatchStats& stats, DispatchPolicy policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write request csv: " + path);
    out << "request_time_s,wait_s,policy,batch_index\n";
    char buf[96];
    for (const ServicedRequest& r : stats.serviced) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%d\n", r.request_time_s, r.wait_s,
                      policy_name(policy), r.batch_index);
        out << buf;
    }
}

void write_batch_csv(const DispatchStats& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write batch csv: " + path);
    out << "batch_index,time_s,occupation_ratio,mean_wait_s,serviced,pending_after,dropped_total\n";
    char buf[128];
    for (const BatchRecord& b : stats.batches) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.9g,%.9g,%d,%d,%d\n", b.index, b.time_s,
                      b.occupation_ratio, b.mean_wait_s, b.serviced, b.pending_after,
                      b.dropped_total);
        out << buf;
    }
}

void write_summary(const StatsSummary& summary, DispatchPolicy policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write summary: " + path);
    char buf[96];
    out << "policy=" << policy_name(policy) << "\n";
    out << "empty=" << (summary.empty ? 1 : 0) << "\n";
    out << "total_requests=" << summary.total << "\n";
    out << "serviced=" << summary.serviced << "\n";
    out << "dropped=" << summary.dropped << "\n";
    std::snprintf(buf, sizeof buf, "drop_rate=%.9g\n", summary.drop_rate);
    out << buf;
    std::snprintf(buf, sizeof buf, "mean_wait_s=%.9g\n", summary.mean_s);
    out << buf;
    std::snprintf(buf, sizeof buf, "std_wait_s=%.9g\n", summary.std_s);
    out << buf;
    std::snprintf(buf, sizeof buf, "median_wait_s=%.9g\n", summary.median_s);
    out << buf;
    std::snprintf(buf, sizeof buf, "p95_wait_s=%.9g\n", summary.p95_s);
    out << buf;
    std::snprintf(buf, sizeof buf, "mean_redundancy=%.9g\n", summary.mean_redundancy);
    out << buf;
}

}  // namespace rvrp
