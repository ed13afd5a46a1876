#include "rvrp/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rvrp/hungarian.hpp"
#include "rvrp/matroid.hpp"
#include "rvrp/rng.hpp"

namespace rvrp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> free_robots(const AssignmentInstance& inst, const Assignment& initial) {
    std::vector<char> used(inst.n_robots(), 0);
    for (const Edge& e : initial.edges) used[e.robot] = 1;
    std::vector<int> free;
    for (int i = 0; i < inst.n_robots(); ++i)
        if (!used[i]) free.push_back(i);
    return free;
}

SolverReport finish_report(Method method, const ObjectiveCache& cache, double baseline,
                           Clock::time_point t0) {
    SolverReport report;
    report.method = method;
    report.redundant = cache.committed();
    report.initial = cache.initial();
    report.cost = cache.total();
    report.baseline = baseline;
    report.objective_calls = cache.query_count();
    report.wall_time_s = seconds_since(t0);
    return report;
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::greedy: return "greedy";
        case Method::optimal: return "optimal";
        case Method::slice_greedy: return "slice_greedy";
        case Method::random: return "random";
        case Method::hungarian_only: return "hungarian";
        case Method::true_oracle: return "true";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "greedy") return Method::greedy;
    if (name == "optimal") return Method::optimal;
    if (name == "slice_greedy" || name == "slice") return Method::slice_greedy;
    if (name == "random") return Method::random;
    if (name == "hungarian") return Method::hungarian_only;
    if (name == "true") return Method::true_oracle;
    throw input_error("unknown method '" + name + "'");
}

std::string SolverReport::csv_header() {
    return "method,J0,J,normalized,objective_calls,wall_time_s,assignment";
}

std::string SolverReport::csv_row() const {
    std::string edges;
    for (const Edge& e : redundant.edges) {
        if (!edges.empty()) edges += ';';
        edges += std::to_string(e.robot) + ":" + std::to_string(e.goal);
    }
    if (edges.empty()) edges = "-";
    char buf[192];
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%llu,%.6f,", method_name(method), baseline,
                  cost, normalized(), static_cast<unsigned long long>(objective_calls), wall_time_s);
    return std::string(buf) + edges;
}

SolverReport greedy(const AssignmentInstance& inst, const Assignment& initial) {
    const auto t0 = Clock::now();
    ObjectiveCache cache(inst, initial);
    const double baseline = cache.total();
    const int rank = inst.deployment_cap - inst.n_goals();

    for (int step = 0; step < rank; ++step) {
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
        cache.commit(best);
    }
    return finish_report(Method::greedy, cache, baseline, t0);
}

SolverReport exhaustive_optimal(const AssignmentInstance& inst, const Assignment& initial) {
    const auto t0 = Clock::now();
    const std::vector<int> free = free_robots(inst, initial);
    const int n_free = static_cast<int>(free.size());
    const int m = inst.n_goals();
    const int rank = inst.deployment_cap - m;

    if (n_free > 20)
        throw guard_error("exhaustive search refused: N - M = " + std::to_string(n_free) +
                          " free robots exceeds the guard of 20 (would enumerate 2^" +
                          std::to_string(n_free) + " subsets per goal)");
    const std::uint64_t n_masks = 1ull << n_free;
    if (static_cast<double>(n_masks) * (m + 1) > static_cast<double>(1u << 26))
        throw guard_error("exhaustive search refused: DP needs about " +
                          std::to_string(n_masks * (m + 1) * 20 / (1 << 20)) + " MiB");

    ObjectiveCache cache(inst, initial);  // used for J_0 and the final commits
    const double baseline = cache.total();

    // robot of O per goal, for seeding per-goal states
    std::vector<int> seed_robot(m, -1);
    for (const Edge& e : initial.edges) seed_robot[e.goal] = e.robot;

    std::uint64_t objective_calls = 0;
    std::vector<std::vector<double>> goal_cost(m, std::vector<double>(n_masks, 0.0));
    std::vector<double> scratch(inst.table.node_count, 0.0);

    for (int j = 0; j < m; ++j) {
        const GoalState base = detail::seed_goal_state(inst, j, seed_robot[j]);
        // DFS over include/exclude of each free robot, carrying the merged state
        auto dfs = [&](auto&& self, int k, std::uint32_t mask, const GoalState& state) -> void {
            if (k == n_free) {
                goal_cost[j][mask] = state.cost;
                ++objective_calls;
                return;
            }
            self(self, k + 1, mask, state);
            if (std::popcount(mask) < rank) {
                GoalState merged;
                merged.assigned = state.assigned + 1;
                merged.cost = detail::merge_goal(inst, j, state.argmin, inst.beliefs[free[k]],
                                                 &merged.argmin, scratch, nullptr);
                self(self, k + 1, mask | (1u << k), merged);
            }
        };
        dfs(dfs, 0, 0, base);
    }

    // dp[j][mask]: min sum of goal costs for goals j.. using exactly the
    // robots in mask; choice[j][mask] records the winning submask for goal j
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n_masks, inf));
    std::vector<std::vector<std::uint32_t>> choice(m, std::vector<std::uint32_t>(n_masks, 0));
    dp[m][0] = 0.0;
    for (int j = m - 1; j >= 0; --j) {
        for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
            if (std::popcount(mask) > rank) continue;
            double best = inf;
            std::uint32_t best_sub = 0;
            std::uint32_t sub = mask;
            while (true) {
                const double rest = dp[j + 1][mask ^ sub];
                if (rest < inf) {
                    const double val = goal_cost[j][sub] + rest;
                    if (val < best) {
                        best = val;
                        best_sub = sub;
                    }
                }
                if (sub == 0) break;
                sub = (sub - 1) & mask;
            }
            dp[j][mask] = best;
            choice[j][mask] = best_sub;
        }
    }

    std::uint32_t best_mask = 0;
    double best_val = inf;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        if (std::popcount(mask) != rank) continue;
        if (dp[0][mask] < best_val) {
            best_val = dp[0][mask];
            best_mask = mask;
        }
    }

    // reconstruct and commit so the cache carries the optimal assignment
    std::uint32_t mask = best_mask;
    for (int j = 0; j < m; ++j) {
        const std::uint32_t sub = choice[j][mask];
        for (int k = 0; k < n_free; ++k)
            if (sub & (1u << k)) cache.commit({free[k], j});
        mask ^= sub;
    }

    SolverReport report = finish_report(Method::optimal, cache, baseline, t0);
    report.objective_calls = objective_calls;
    return report;
}

SolverReport slice_greedy(const AssignmentInstance& inst, const Assignment& initial) {
    const auto t0 = Clock::now();
    ObjectiveCache cache(inst, initial);
    const double baseline = cache.total();
    const int m = inst.n_goals();
    int budget = inst.deployment_cap - m;

    while (budget >= m) {
        for (int j = 0; j < m; ++j) {
            Edge best{-1, j};
            double best_delta = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < inst.n_robots(); ++i) {
                if (cache.robot_assigned(i)) continue;
                const double delta = cache.marginal_decrease({i, j});
                if (delta > best_delta) {
                    best_delta = delta;
                    best = {i, j};
                }
            }
            cache.commit(best);
            --budget;
        }
    }
    // partial round: leftover budget goes to the goals with the largest
    // marginal decrease, one robot per goal
    std::vector<char> goal_served(m, 0);
    while (budget > 0) {
        Edge best{-1, -1};
        double best_delta = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (goal_served[j]) continue;
            for (int i = 0; i < inst.n_robots(); ++i) {
                if (cache.robot_assigned(i)) continue;
                const double delta = cache.marginal_decrease({i, j});
                if (delta > best_delta) {
                    best_delta = delta;
                    best = {i, j};
                }
            }
        }
        cache.commit(best);
        goal_served[best.goal] = 1;
        --budget;
    }
    return finish_report(Method::slice_greedy, cache, baseline, t0);
}

SolverReport random_assign(const AssignmentInstance& inst, const Assignment& initial,
                           std::uint64_t seed) {
    const auto t0 = Clock::now();
    ObjectiveCache cache(inst, initial);
    const double baseline = cache.total();
    const std::vector<int> free = free_robots(inst, initial);
    const int rank = inst.deployment_cap - inst.n_goals();

    Rng rng(seed);
    const std::vector<int> chosen =
        rng.sample_without_replacement(static_cast<int>(free.size()), rank);
    for (int pick : chosen) {
        const int goal = static_cast<int>(rng.uniform_int(0, inst.n_goals() - 1));
        cache.commit({free[pick], goal});
    }
    return finish_report(Method::random, cache, baseline, t0);
}

SolverReport hungarian_only(const AssignmentInstance& inst, const Assignment& initial) {
    const auto t0 = Clock::now();
    ObjectiveCache cache(inst, initial);
    return finish_report(Method::hungarian_only, cache, cache.total(), t0);
}

SolverReport true_oracle(const AssignmentInstance& inst) {
    const auto t0 = Clock::now();
    if (!inst.has_true_nodes())
        throw input_error("true oracle needs an instance with true robot positions");

    const int n = inst.n_robots(), m = inst.n_goals();
    std::vector<std::vector<double>> cost(m, std::vector<double>(n));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) cost[j][i] = inst.table.at(j, inst.true_nodes[i]);

    const HungarianResult hung = hungarian_min_cost(cost);
    SolverReport report;
    report.method = Method::true_oracle;
    for (int j = 0; j < m; ++j) report.initial.add({hung.col_of_row[j], j});
    report.cost = hung.total / m;
    report.baseline = report.cost;
    report.wall_time_s = seconds_since(t0);
    return report;
}

BoundCertificate verify_bound(const SolverReport& greedy_report,
                              const SolverReport& optimal_report) {
    std::vector<Edge> a = greedy_report.initial.edges, b = optimal_report.initial.edges;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b || std::abs(greedy_report.baseline - optimal_report.baseline) > 1e-9)
        throw input_error("bound check needs reports for the same instance and O");

    BoundCertificate cert;
    cert.lhs = greedy_report.cost;
    cert.optimal_cost = optimal_report.cost;
    cert.baseline = greedy_report.baseline;
    cert.rhs = 0.5 * (optimal_report.cost + greedy_report.baseline);
    cert.holds = cert.lhs <= cert.rhs + 1e-9;
    return cert;
}

}  // namespace rvrp
