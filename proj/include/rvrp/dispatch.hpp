#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rvrp/instance.hpp"
#include "rvrp/transport_graph.hpp"
#include "rvrp/uncertainty.hpp"

namespace rvrp {

struct Request {
    double time_s = 0.0;  // seconds of day
    int pickup = 0;
    int dropoff = 0;
};

struct RequestTrace {
    std::vector<Request> events;  // non-decreasing in time after load
};

/// CSV with header: request_time_s,pickup_node,dropoff_node
RequestTrace load_trace(const std::string& path, const TransportGraph& graph);
void save_trace(const RequestTrace& trace, const std::string& path);

/// Poisson arrivals; pickup/dropoff uniform with pickup != dropoff.
RequestTrace generate_synthetic_trace(const TransportGraph& graph, double rate_per_s,
                                      double duration_s, std::uint64_t seed);

enum class DispatchPolicy { redundant, non_redundant };

struct ReplayParams {
    DispatchPolicy policy = DispatchPolicy::redundant;
    NoiseSpec noise;
    double fleet_factor = 1.56;  // fleet size = ceil(factor * occupied trips)
    std::uint64_t seed = 0;
    double batch_interval_s = 20.0;
    double drop_after_s = 600.0;
    double p_min = 1e-6;
    // a redundant vehicle is deployed only when its expected saving exceeds
    // this; epsilon-gain hedges burn future supply for nothing
    double min_hedge_gain_s = 3.0;
};

struct ServicedRequest {
    double request_time_s = 0.0;
    double wait_s = 0.0;  // request to winner's pickup arrival
    int batch_index = 0;
    int vehicles_assigned = 1;  // 1 + redundant vehicles sent to this request
};

struct BatchRecord {
    int index = 0;
    double time_s = 0.0;
    double occupation_ratio = 0.0;  // non-idle fraction of the fleet, post assignment
    double mean_wait_s = 0.0;       // over requests serviced in this batch; 0 if none
    int serviced = 0;
    int pending_after = 0;
    int dropped_total = 0;
};

struct DispatchStats {
    std::vector<ServicedRequest> serviced;
    std::vector<BatchRecord> batches;
    int dropped = 0;
    int total_requests = 0;
};

/// Batched continuous assignment over the trace. Conservation and exclusivity
/// invariants are checked on every batch and raise std::logic_error if broken.
DispatchStats replay(const TransportGraph& graph, const RequestTrace& trace,
                     const ReplayParams& params);

struct StatsSummary {
    bool empty = true;
    int serviced = 0, dropped = 0, total = 0;
    double mean_s = 0.0, std_s = 0.0;  // population std
    double median_s = 0.0, p95_s = 0.0;  // nearest-rank percentile
    double drop_rate = 0.0;
    double mean_redundancy = 0.0;  // mean vehicles assigned per serviced request
    std::vector<std::pair<double, double>> batch_density;  // (occupation ratio, mean wait)
};

StatsSummary summarize(const DispatchStats& stats);

void write_request_csv(const DispatchStats& stats, DispatchPolicy policy, const std::string& path);
void write_batch_csv(const DispatchStats& stats, const std::string& path);
void write_summary(const StatsSummary& summary, DispatchPolicy policy, const std::string& path);

const char* policy_name(DispatchPolicy policy);
DispatchPolicy parse_policy(const std::string& name);

}  // namespace rvrp
