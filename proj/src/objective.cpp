#include "rvrp/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rvrp {

namespace detail {

GoalState seed_goal_state(const AssignmentInstance& inst, int goal, int robot) {
    const double* f = inst.table.row(goal);
    GoalState state;
    state.assigned = 1;
    state.argmin.reserve(inst.beliefs[robot].support.size());
    for (const auto& [node, p] : inst.beliefs[robot].support) {
        state.argmin.push_back({node, p, f[node]});
        state.cost += p * f[node];
    }
    return state;
}

double merge_goal(const AssignmentInstance& inst, int goal,
                  const std::vector<WeightedNode>& incumbent, const PositionBelief& belief,
                  std::vector<WeightedNode>* out, std::vector<double>& scratch,
                  std::uint64_t* pair_counter) {
    const double* f = inst.table.row(goal);
    double new_cost = 0.0;

    if (out == nullptr) {
        for (const WeightedNode& a : incumbent) {
            const double f1 = a.cost;
            double acc = 0.0;
            for (const auto& [node, p2] : belief.support) {
                const double f2 = f[node];
                acc += p2 * (f1 <= f2 ? f1 : f2);
            }
            new_cost += a.prob * acc;
        }
    } else {
        std::vector<int> touched;
        touched.reserve(incumbent.size() + belief.support.size());
        for (const WeightedNode& a : incumbent) {
            const double f1 = a.cost;
            double acc = 0.0;
            for (const auto& [node, p2] : belief.support) {
                const double f2 = f[node];
                const double p = a.prob * p2;
                // tie keeps the mass with the incumbent; the contributed cost
                // is identical either way
                const int winner = f1 <= f2 ? a.node : node;
                if (scratch[winner] == 0.0) touched.push_back(winner);
                scratch[winner] += p;
                acc += p2 * (f1 <= f2 ? f1 : f2);
            }
            new_cost += a.prob * acc;
        }
        std::sort(touched.begin(), touched.end());
        out->clear();
        out->reserve(touched.size());
        for (int v : touched) {
            out->push_back({v, scratch[v], f[v]});
            scratch[v] = 0.0;
        }
    }

    if (pair_counter)
        *pair_counter += static_cast<std::uint64_t>(incumbent.size()) *
                         static_cast<std::uint64_t>(belief.support.size());
    return new_cost;
}

}  // namespace detail

namespace {

// robot -> goal map of A over O; validates the one-goal-per-robot constraint
// and that O covers every goal exactly once.
std::vector<int> combined_goal_of_robot(const AssignmentInstance& inst, const Assignment& redundant,
                                        const Assignment& initial) {
    const int n = inst.n_robots(), m = inst.n_goals();
    std::vector<int> goal_of(n, -1);
    std::vector<int> cover(m, 0);
    for (const Edge& e : initial.edges) {
        if (e.robot < 0 || e.robot >= n || e.goal < 0 || e.goal >= m)
            throw input_error("initial assignment edge out of range");
        if (goal_of[e.robot] != -1)
            throw constraint_error("robot " + std::to_string(e.robot) + " assigned twice in O");
        goal_of[e.robot] = e.goal;
        ++cover[e.goal];
    }
    for (int j = 0; j < m; ++j)
        if (cover[j] != 1)
            throw input_error("initial assignment must cover goal " + std::to_string(j) +
                              " exactly once");
    for (const Edge& e : redundant.edges) {
        if (e.robot < 0 || e.robot >= n || e.goal < 0 || e.goal >= m)
            throw input_error("assignment edge out of range");
        if (goal_of[e.robot] != -1)
            throw constraint_error("robot " + std::to_string(e.robot) +
                                   " assigned twice across A and O");
        goal_of[e.robot] = e.goal;
    }
    return goal_of;
}

}  // namespace

double exact_cost(const AssignmentInstance& inst, const Assignment& redundant,
                  const Assignment& initial, std::uint64_t max_joint_outcomes) {
    const int m = inst.n_goals();
    const std::vector<int> goal_of = combined_goal_of_robot(inst, redundant, initial);

    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        std::vector<int> group;
        for (int i = 0; i < inst.n_robots(); ++i)
            if (goal_of[i] == j) group.push_back(i);

        double outcomes = 1.0;
        for (int i : group) outcomes *= static_cast<double>(inst.beliefs[i].support.size());
        if (outcomes > static_cast<double>(max_joint_outcomes))
            throw guard_error("joint support too large for exact evaluation: ~" +
                              std::to_string(outcomes) + " outcomes at goal " + std::to_string(j) +
                              " (limit " + std::to_string(max_joint_outcomes) + ")");

        const double* f = inst.table.row(j);
        const int k = static_cast<int>(group.size());
        std::vector<std::size_t> idx(k, 0);
        double goal_sum = 0.0;
        while (true) {
            double prob = 1.0;
            double best = std::numeric_limits<double>::infinity();
            for (int s = 0; s < k; ++s) {
                const auto& [node, p] = inst.beliefs[group[s]].support[idx[s]];
                prob *= p;
                best = std::min(best, f[node]);
            }
            goal_sum += prob * best;
            int s = k - 1;
            while (s >= 0 && ++idx[s] == inst.beliefs[group[s]].support.size()) idx[s--] = 0;
            if (s < 0) break;
        }
        total += goal_sum;
    }
    return total / m;
}

ObjectiveCache::ObjectiveCache(const AssignmentInstance& inst, const Assignment& initial)
    : inst_(&inst), initial_(initial) {
    inst.validate();
    const int n = inst.n_robots(), m = inst.n_goals();
    goals_.resize(m);
    robot_used_.assign(n, 0);
    scratch_.assign(inst.table.node_count, 0.0);

    std::vector<int> cover(m, 0);
    for (const Edge& e : initial.edges) {
        if (e.robot < 0 || e.robot >= n || e.goal < 0 || e.goal >= m)
            throw input_error("initial assignment edge out of range");
        if (robot_used_[e.robot])
            throw constraint_error("robot " + std::to_string(e.robot) + " assigned twice in O");
        robot_used_[e.robot] = 1;
        ++cover[e.goal];
        goals_[e.goal] = detail::seed_goal_state(inst, e.goal, e.robot);
    }
    for (int j = 0; j < m; ++j)
        if (cover[j] != 1)
            throw input_error("initial assignment must cover goal " + std::to_string(j) +
                              " exactly once");
    total_ = 0.0;
    for (const GoalState& g : goals_) total_ += g.cost;
    total_ /= m;
}

ObjectiveCache::ObjectiveCache(const ObjectiveCache& other)
    : inst_(other.inst_),
      goals_(other.goals_),
      robot_used_(other.robot_used_),
      initial_(other.initial_),
      committed_(other.committed_),
      total_(other.total_),
      pair_ops_(other.pair_ops_.load(std::memory_order_relaxed)),
      queries_(other.queries_.load(std::memory_order_relaxed)),
      scratch_(other.scratch_) {}

ObjectiveCache& ObjectiveCache::operator=(const ObjectiveCache& other) {
    if (this == &other) return *this;
    inst_ = other.inst_;
    goals_ = other.goals_;
    robot_used_ = other.robot_used_;
    initial_ = other.initial_;
    committed_ = other.committed_;
    total_ = other.total_;
    pair_ops_.store(other.pair_ops_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    queries_.store(other.queries_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    scratch_ = other.scratch_;
    return *this;
}

void ObjectiveCache::check_edge(Edge e) const {
    if (e.goal < 0 || e.goal >= inst_->n_goals())
        throw input_error("goal index " + std::to_string(e.goal) + " out of range");
    if (e.robot < 0 || e.robot >= inst_->n_robots())
        throw input_error("robot index " + std::to_string(e.robot) + " out of range");
    if (robot_used_[e.robot])
        throw constraint_error("robot " + std::to_string(e.robot) +
                               " already assigned in the current A and O");
}

double ObjectiveCache::marginal_decrease(Edge e) const {
    check_edge(e);
    queries_.fetch_add(1, std::memory_order_relaxed);
    std::uint64_t pairs = 0;
    std::vector<double> unused;
    const double new_cost = detail::merge_goal(*inst_, e.goal, goals_[e.goal].argmin,
                                               inst_->beliefs[e.robot], nullptr, unused, &pairs);
    pair_ops_.fetch_add(pairs, std::memory_order_relaxed);
    return (goals_[e.goal].cost - new_cost) / inst_->n_goals();
}

void ObjectiveCache::commit(Edge e) {
    check_edge(e);
    std::uint64_t pairs = 0;
    std::vector<WeightedNode> merged;
    const double new_cost = detail::merge_goal(*inst_, e.goal, goals_[e.goal].argmin,
                                               inst_->beliefs[e.robot], &merged, scratch_, &pairs);
    pair_ops_.fetch_add(pairs, std::memory_order_relaxed);

    GoalState& g = goals_[e.goal];
    total_ += (new_cost - g.cost) / inst_->n_goals();
    g.cost = new_cost;
    g.argmin = std::move(merged);
    ++g.assigned;
    robot_used_[e.robot] = 1;
    committed_.edges.push_back(e);
}

}  // namespace rvrp
