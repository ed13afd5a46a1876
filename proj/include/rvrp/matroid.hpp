#pragma once

#include <vector>

#include "rvrp/instance.hpp"

namespace rvrp {

/// The independence system over redundant edges: |A| <= N_d - M plus
/// one-goal-per-robot across A and the initial assignment.
struct IndependenceContext {
    int n_robots = 0;
    int n_goals = 0;
    int deployment_cap = 0;
    Assignment initial;
    std::vector<char> robot_in_initial;

    int rank() const { return deployment_cap - n_goals; }
};

IndependenceContext make_context(const AssignmentInstance& inst, const Assignment& initial);

/// True iff both the cardinality bound and the one-goal-per-robot constraint
/// hold for A over the initial assignment. A must be disjoint from O.
bool is_independent(const IndependenceContext& ctx, const Assignment& a);

/// All single edges x with A + {x} independent; empty at full rank.
std::vector<Edge> eligible_edges(const IndependenceContext& ctx, const Assignment& a);

}  // namespace rvrp
