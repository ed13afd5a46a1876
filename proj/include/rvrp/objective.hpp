#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "rvrp/instance.hpp"

namespace rvrp {

/// One entry of a goal's argmin distribution: probability that the currently
/// fastest robot for the goal is truly at `node`, with f(node, goal) cached.
struct WeightedNode {
    int node = 0;
    double prob = 0.0;
    double cost = 0.0;
};

/// Per-goal state: argmin distribution P_j, goal cost J_j, group size.
struct GoalState {
    std::vector<WeightedNode> argmin;  // node ascending
    double cost = 0.0;
    int assigned = 0;
};

namespace detail {

/// Seeds a goal state from a single robot's belief (first assignment to the goal).
GoalState seed_goal_state(const AssignmentInstance& inst, int goal, int robot);

/// Pairwise winner merge of a robot's belief into an incumbent argmin
/// distribution. Returns the new goal cost; when out is non-null it receives
/// the new argmin distribution. Ties keep the mass with the incumbent, which
/// leaves the cost unchanged either way. pair_counter, when given, is advanced
/// by |incumbent| * |belief support|.
double merge_goal(const AssignmentInstance& inst, int goal,
                  const std::vector<WeightedNode>& incumbent, const PositionBelief& belief,
                  std::vector<WeightedNode>* out, std::vector<double>& scratch,
                  std::uint64_t* pair_counter);

}  // namespace detail

/// Exact expected effective waiting time by joint-support enumeration.
/// Intended for small instances only; refuses when the largest per-goal joint
/// support exceeds max_joint_outcomes.
double exact_cost(const AssignmentInstance& inst, const Assignment& redundant,
                  const Assignment& initial, std::uint64_t max_joint_outcomes = 1'000'000);

/// Incremental objective evaluator. Single writer; concurrent const queries
/// against a frozen cache are safe.
class ObjectiveCache {
public:
    /// Seeds the cache with the initial assignment applied one edge at a time;
    /// afterwards total() equals the no-redundancy cost J_0.
    ObjectiveCache(const AssignmentInstance& inst, const Assignment& initial);

    ObjectiveCache(const ObjectiveCache& other);
    ObjectiveCache& operator=(const ObjectiveCache& other);

    double total() const { return total_; }
    double goal_cost(int goal) const { return goals_[goal].cost; }
    const std::vector<WeightedNode>& goal_argmin(int goal) const { return goals_[goal].argmin; }
    bool robot_assigned(int robot) const { return robot_used_[robot] != 0; }
    const Assignment& committed() const { return committed_; }
    const Assignment& initial() const { return initial_; }
    const AssignmentInstance& instance() const { return *inst_; }

    /// J(current) - J(current + edge), without mutating the cache.
    double marginal_decrease(Edge e) const;

    /// Applies the edge: updates the goal's argmin distribution, goal cost and
    /// total consistently.
    void commit(Edge e);

    std::uint64_t pair_ops() const { return pair_ops_.load(std::memory_order_relaxed); }
    std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }

private:
    const AssignmentInstance* inst_;
    std::vector<GoalState> goals_;
    std::vector<char> robot_used_;
    Assignment initial_;
    Assignment committed_;
    double total_ = 0.0;
    mutable std::atomic<std::uint64_t> pair_ops_{0};
    mutable std::atomic<std::uint64_t> queries_{0};
    std::vector<double> scratch_;  // |V| zeros between commits

    void check_edge(Edge e) const;
};

}  // namespace rvrp
