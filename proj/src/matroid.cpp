#include "rvrp/matroid.hpp"

namespace rvrp {

IndependenceContext make_context(const AssignmentInstance& inst, const Assignment& initial) {
    IndependenceContext ctx;
    ctx.n_robots = inst.n_robots();
    ctx.n_goals = inst.n_goals();
    ctx.deployment_cap = inst.deployment_cap;
    ctx.initial = initial;
    ctx.robot_in_initial.assign(ctx.n_robots, 0);
    for (const Edge& e : initial.edges) {
        if (e.robot < 0 || e.robot >= ctx.n_robots || e.goal < 0 || e.goal >= ctx.n_goals)
            throw input_error("initial assignment edge out of range");
        if (ctx.robot_in_initial[e.robot])
            throw constraint_error("robot " + std::to_string(e.robot) + " assigned twice in O");
        ctx.robot_in_initial[e.robot] = 1;
    }
    if (ctx.rank() < 0) throw input_error("deployment cap below goal count");
    return ctx;
}

bool is_independent(const IndependenceContext& ctx, const Assignment& a) {
    if (static_cast<int>(a.size()) > ctx.rank()) return false;
    std::vector<char> used = ctx.robot_in_initial;
    for (const Edge& e : a.edges) {
        if (e.robot < 0 || e.robot >= ctx.n_robots || e.goal < 0 || e.goal >= ctx.n_goals)
            throw input_error("assignment edge out of range");
        if (ctx.initial.contains(e))
            throw input_error("edge (" + std::to_string(e.robot) + "," + std::to_string(e.goal) +
                              ") belongs to the initial assignment");
        if (used[e.robot]) return false;
        used[e.robot] = 1;
    }
    return true;
}

std::vector<Edge> eligible_edges(const IndependenceContext& ctx, const Assignment& a) {
    std::vector<Edge> result;
    if (static_cast<int>(a.size()) >= ctx.rank()) return result;
    std::vector<char> used = ctx.robot_in_initial;
    for (const Edge& e : a.edges) used[e.robot] = 1;
    for (int i = 0; i < ctx.n_robots; ++i) {
        if (used[i]) continue;
        for (int j = 0; j < ctx.n_goals; ++j) {
            // edges of O use an already-used robot, so no eligible edge can
            // collide with O
            result.push_back({i, j});
        }
    }
    return result;
}

}  // namespace rvrp
