#pragma once

#include <cstdint>
#include <string>

#include "rvrp/instance.hpp"
#include "rvrp/objective.hpp"

namespace rvrp {

enum class Method { greedy, optimal, slice_greedy, random, hungarian_only, true_oracle };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct SolverReport {
    Method method = Method::greedy;
    Assignment redundant;  // A
    Assignment initial;    // O
    double cost = 0.0;     // J_O(A)
    double baseline = 0.0; // J_0
    std::uint64_t objective_calls = 0;
    double wall_time_s = 0.0;

    double normalized() const { return baseline > 0.0 ? cost / baseline : 1.0; }
    static std::string csv_header();
    std::string csv_row() const;
};

/// Matroid-constrained greedy: repeatedly commits the eligible edge with the
/// largest marginal decrease until |A| = N_d - M. Ties break lexicographically
/// by (robot, goal).
SolverReport greedy(const AssignmentInstance& inst, const Assignment& initial);

/// Exact minimum over all independent A with |A| = N_d - M, via per-goal
/// subset costs and a DP over goals. Guarded: refuses when N - M > 20 or the
/// DP would not fit in memory.
SolverReport exhaustive_optimal(const AssignmentInstance& inst, const Assignment& initial);

/// Round-robin baseline: each round gives every goal (ascending) its best free
/// robot; a final partial round spends the leftover budget on the goals with
/// the largest marginal decrease.
SolverReport slice_greedy(const AssignmentInstance& inst, const Assignment& initial);

/// Uniformly random redundant assignment (distinct free robots, random goals).
SolverReport random_assign(const AssignmentInstance& inst, const Assignment& initial,
                           std::uint64_t seed);

/// The initial assignment alone (A empty, cost J_0).
SolverReport hungarian_only(const AssignmentInstance& inst, const Assignment& initial);

/// Hungarian on noise-free travel times; needs true_nodes. Reported cost is
/// the realized waiting time of that matching.
SolverReport true_oracle(const AssignmentInstance& inst);

struct BoundCertificate {
    bool holds = false;
    double lhs = 0.0;  // J_greedy
    double rhs = 0.0;  // (J_opt + J_0) / 2
    double optimal_cost = 0.0;
    double baseline = 0.0;
};

/// Checks J_greedy <= (J_opt + J_0)/2 for two reports of the same instance.
BoundCertificate verify_bound(const SolverReport& greedy_report,
                              const SolverReport& optimal_report);

}  // namespace rvrp
