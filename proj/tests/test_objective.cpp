#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvrp/objective.hpp"
#include "rvrp/rng.hpp"
#include "test_helpers.hpp"

using namespace rvrp;

namespace {

// goal at node 0; spoke nodes 1..k have a direct arc to it, so f(i, 0) is the
// arc weight and every value is engineered
struct Star {
    TransportGraph graph;
    AssignmentInstance instance;
};

Star star_instance(const std::vector<double>& spoke_costs, int cap) {
    std::vector<GraphNode> nodes{{0, 0, 0}};
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < spoke_costs.size(); ++i) {
        nodes.push_back({(int)i + 1, 10.0 * (double)(i + 1), 0.0});
        edges.push_back({(int)i + 1, 0, spoke_costs[i]});
        edges.push_back({0, (int)i + 1, 1.0});
    }
    Star s{TransportGraph(std::move(nodes), std::move(edges)), {}};
    s.instance.goal_nodes = {0};
    s.instance.deployment_cap = cap;
    s.instance.table = shortest_travel_times(s.graph, {0});
    return s;
}

PositionBelief point_mass(int robot, int node) {
    PositionBelief b;
    b.robot_id = robot;
    b.support = {{node, 1.0}};
    return b;
}

}  // namespace

TEST_CASE("exact cost with no redundancy is the mean initial expected cost") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [graph, inst] = testutil::random_instance(20, 5, 2, 4, 4, rng);
        const Assignment o = initial_assignment(inst);
        double j0 = 0.0;
        for (const Edge& e : o.edges) j0 += expected_cost(inst.beliefs[e.robot], inst.table, e.goal);
        j0 /= inst.n_goals();
        CHECK(exact_cost(inst, {}, o) == doctest::Approx(j0).epsilon(1e-12));
    }
}

TEST_CASE("exact cost takes the min of two point-mass robots") {
    Star s = star_instance({30.0, 12.0}, 2);
    s.instance.beliefs = {point_mass(0, 1), point_mass(1, 2)};
    Assignment o;
    o.add({0, 0});
    Assignment a;
    a.add({1, 0});
    CHECK(exact_cost(s.instance, a, o) == doctest::Approx(12.0));
}

TEST_CASE("exact cost enumerates the four joint outcomes of two 2-node beliefs") {
    Star s = star_instance({10.0, 20.0, 7.0, 50.0}, 2);
    PositionBelief r0;
    r0.robot_id = 0;
    r0.support = {{1, 0.3}, {2, 0.7}};  // f = 10 or 20
    PositionBelief r1;
    r1.robot_id = 1;
    r1.support = {{3, 0.6}, {4, 0.4}};  // f = 7 or 50
    s.instance.beliefs = {r0, r1};
    Assignment o;
    o.add({0, 0});
    Assignment a;
    a.add({1, 0});
    // hand enumeration: min(10,7)*0.18 + min(10,50)*0.12 + min(20,7)*0.42 + min(20,50)*0.28
    const double expected = 7 * 0.3 * 0.6 + 10 * 0.3 * 0.4 + 7 * 0.7 * 0.6 + 20 * 0.7 * 0.4;
    CHECK(exact_cost(s.instance, a, o) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("exact cost refuses oversized joint supports with an estimate") {
    Rng rng(6);
    const auto [graph, inst_base] = testutil::random_instance(30, 8, 1, 8, 10, rng);
    AssignmentInstance inst = inst_base;
    // force every belief to have 10 support nodes on goal 0
    inst.beliefs.clear();
    for (int i = 0; i < 8; ++i) {
        PositionBelief b;
        b.robot_id = i;
        for (int k = 0; k < 10; ++k) b.support.emplace_back(k, 0.1);
        inst.beliefs.push_back(b);
    }
    Assignment o;
    o.add({0, 0});
    Assignment a;
    for (int i = 1; i < 8; ++i) a.add({i, 0});  // joint support 10^8
    CHECK_THROWS_WITH_AS(exact_cost(inst, a, o), doctest::Contains("joint support too large"),
                         guard_error);
}

TEST_CASE("exact cost rejects constraint violations") {
    Star s = star_instance({10.0, 20.0}, 2);
    s.instance.beliefs = {point_mass(0, 1), point_mass(1, 2)};
    Assignment o;
    o.add({0, 0});
    Assignment dup;
    dup.add({0, 0});  // robot 0 already in O
    CHECK_THROWS_AS(exact_cost(s.instance, dup, o), constraint_error);
    CHECK_THROWS_AS(exact_cost(s.instance, {}, Assignment{}), input_error);  // O misses the goal
}

TEST_CASE("fresh cache total equals J0 and the exact oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [graph, inst] = testutil::random_instance(25, 6, 3, 5, 5, rng);
        const Assignment o = initial_assignment(inst);
        const ObjectiveCache cache(inst, o);
        CHECK(cache.total() ==
              doctest::Approx(exact_cost(inst, {}, o)).epsilon(1e-9));
    }
}

TEST_CASE("fresh cache matches the oracle at benchmark scale") {
    // N=16, M=4 with wide gaussian beliefs; with one robot per goal the joint
    // enumeration stays linear in the support sizes
    const TransportGraph g = build_grid(16, 16, 50.0, 10.0);
    Rng rng(71);
    const std::vector<int> nodes = rng.sample_without_replacement(256, 20);
    const std::vector<int> robots(nodes.begin(), nodes.begin() + 16);
    const std::vector<int> goals(nodes.begin() + 16, nodes.end());
    const AssignmentInstance inst =
        build_instance(g, goals, robots, {NoiseKind::gaussian, 100.0}, 8, 1e-6, 3);
    const Assignment o = initial_assignment(inst);
    const ObjectiveCache cache(inst, o);
    CHECK(cache.total() == doctest::Approx(exact_cost(inst, {}, o)).epsilon(1e-9));
}

TEST_CASE("cache seed for M=1 point mass is the travel time") {
    Star s = star_instance({42.0}, 1);
    s.instance.beliefs = {point_mass(0, 1)};
    Assignment o;
    o.add({0, 0});
    const ObjectiveCache cache(s.instance, o);
    CHECK(cache.total() == doctest::Approx(42.0));
}

TEST_CASE("first assignment copies the robot belief into the argmin cache") {
    const TransportGraph g = build_grid(3, 3, 50.0, 10.0);
    AssignmentInstance inst;
    inst.goal_nodes = {0, 8};
    inst.deployment_cap = 2;
    inst.table = shortest_travel_times(g, inst.goal_nodes);
    PositionBelief b;
    b.robot_id = 0;
    b.support = {{2, 0.25}, {4, 0.75}};
    PositionBelief c = b;
    c.robot_id = 1;
    inst.beliefs = {b, c};
    Assignment o;
    o.add({0, 0});
    o.add({1, 1});
    const ObjectiveCache cache(inst, o);
    for (int j = 0; j < 2; ++j) {
        REQUIRE(cache.goal_argmin(j).size() == 2);
        CHECK(cache.goal_argmin(j)[0].node == 2);
        CHECK(cache.goal_argmin(j)[0].prob == 0.25);
        CHECK(cache.goal_argmin(j)[1].node == 4);
        CHECK(cache.goal_argmin(j)[1].prob == 0.75);
    }
}

TEST_CASE("marginal decrease: dominated robot contributes nothing") {
    Star s = star_instance({5.0, 80.0, 90.0}, 2);
    s.instance.beliefs = {point_mass(0, 1), point_mass(1, 2), point_mass(2, 3)};
    Assignment o;
    o.add({0, 0});
    const ObjectiveCache cache(s.instance, o);
    CHECK(cache.marginal_decrease({1, 0}) == doctest::Approx(0.0));
    CHECK(cache.marginal_decrease({2, 0}) == doctest::Approx(0.0));
}

TEST_CASE("marginal decrease: point mass at the goal recovers the whole goal cost") {
    // single goal so the 1/M factor is 1
    Star s = star_instance({37.0, 1.0}, 2);
    s.instance.beliefs = {point_mass(0, 1), point_mass(1, 0)};  // robot 1 sits on the goal
    Assignment o;
    o.add({0, 0});
    const ObjectiveCache cache(s.instance, o);
    CHECK(cache.marginal_decrease({1, 0}) == doctest::Approx(cache.goal_cost(0)));
    CHECK(cache.goal_cost(0) == doctest::Approx(37.0));
}

TEST_CASE("marginal decrease agrees with the exact oracle and does not mutate") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [graph, inst] = testutil::random_instance(20, 6, 2, 6, 5, rng);
        const Assignment o = initial_assignment(inst);
        ObjectiveCache cache(inst, o);

        Assignment a;
        std::vector<Edge> committed;
        // commit one random eligible edge first
        for (int i = 0; i < inst.n_robots(); ++i) {
            if (!cache.robot_assigned(i)) {
                const Edge e{i, (int)rng.uniform_int(0, 1)};
                cache.commit(e);
                a.add(e);
                break;
            }
        }
        int probe = -1;
        for (int i = inst.n_robots() - 1; i >= 0; --i) {
            if (!cache.robot_assigned(i)) {
                probe = i;
                break;
            }
        }
        REQUIRE(probe >= 0);
        const Edge x{probe, (int)rng.uniform_int(0, 1)};

        const double total_before = cache.total();
        const double delta = cache.marginal_decrease(x);
        CHECK(cache.total() == total_before);  // query must not mutate

        Assignment a_x = a;
        a_x.add(x);
        const double oracle = exact_cost(inst, a, o) - exact_cost(inst, a_x, o);
        CHECK(delta == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("marginal decrease rejects assigned robots and bad indices") {
    Star s = star_instance({10.0, 20.0}, 2);
    s.instance.beliefs = {point_mass(0, 1), point_mass(1, 2)};
    Assignment o;
    o.add({0, 0});
    ObjectiveCache cache(s.instance, o);
    CHECK_THROWS_AS(cache.marginal_decrease({0, 0}), constraint_error);  // robot in O
    CHECK_THROWS_AS(cache.marginal_decrease({1, 5}), input_error);
    CHECK_THROWS_AS(cache.marginal_decrease({9, 0}), input_error);
    cache.commit({1, 0});
    CHECK_THROWS_AS(cache.marginal_decrease({1, 0}), constraint_error);  // now assigned
    CHECK_THROWS_AS(cache.commit({1, 0}), constraint_error);
}

TEST_CASE("committed totals track the exact oracle step by step") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [graph, inst] = testutil::random_instance(22, 6, 2, 6, 5, rng);
        const Assignment o = initial_assignment(inst);
        ObjectiveCache cache(inst, o);
        Assignment a;
        for (int step = 0; step < 4; ++step) {
            int robot = -1;
            for (int i = 0; i < inst.n_robots(); ++i) {
                if (!cache.robot_assigned(i)) {
                    robot = i;
                    break;
                }
            }
            if (robot < 0) break;
            const Edge e{robot, (int)rng.uniform_int(0, 1)};
            cache.commit(e);
            a.add(e);
            CHECK(cache.total() == doctest::Approx(exact_cost(inst, a, o)).epsilon(1e-9));
        }
    }
}

TEST_CASE("commits to one goal leave other goals bit identical") {
    Rng rng(10);
    const auto [graph, inst] = testutil::random_instance(25, 6, 3, 6, 5, rng);
    const Assignment o = initial_assignment(inst);
    ObjectiveCache cache(inst, o);
    const double cost1 = cache.goal_cost(1);
    const double cost2 = cache.goal_cost(2);
    const auto argmin1 = cache.goal_argmin(1);

    for (int i = 0; i < inst.n_robots(); ++i)
        if (!cache.robot_assigned(i)) cache.commit({i, 0});

    CHECK(cache.goal_cost(1) == cost1);  // bit identical
    CHECK(cache.goal_cost(2) == cost2);
    REQUIRE(cache.goal_argmin(1).size() == argmin1.size());
    for (std::size_t k = 0; k < argmin1.size(); ++k) {
        CHECK(cache.goal_argmin(1)[k].node == argmin1[k].node);
        CHECK(cache.goal_argmin(1)[k].prob == argmin1[k].prob);
    }
}

TEST_CASE("engineered travel-time ties do not disturb the objective") {
    // two robots whose supports share nodes and costs; ties hit the <= branch
    Star s = star_instance({10.0, 10.0, 10.0, 25.0}, 2);
    PositionBelief r0;
    r0.robot_id = 0;
    r0.support = {{1, 0.5}, {4, 0.5}};
    PositionBelief r1;
    r1.robot_id = 1;
    r1.support = {{2, 0.5}, {3, 0.5}};  // f both 10: always tied with r0's node 1
    s.instance.beliefs = {r0, r1};
    Assignment o;
    o.add({0, 0});
    ObjectiveCache cache(s.instance, o);
    cache.commit({1, 0});
    Assignment a;
    a.add({1, 0});
    CHECK(cache.total() == doctest::Approx(exact_cost(s.instance, a, o)).epsilon(1e-12));
    double mass = 0.0;
    for (const WeightedNode& w : cache.goal_argmin(0)) mass += w.prob;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("argmin distributions stay normalized after many commits") {
    Rng rng(12);
    const auto [graph, inst] = testutil::random_instance(25, 8, 2, 8, 5, rng);
    const Assignment o = initial_assignment(inst);
    ObjectiveCache cache(inst, o);
    for (int i = 0; i < inst.n_robots(); ++i)
        if (!cache.robot_assigned(i)) cache.commit({i, (int)rng.uniform_int(0, 1)});
    for (int j = 0; j < 2; ++j) {
        double mass = 0.0;
        for (const WeightedNode& w : cache.goal_argmin(j)) mass += w.prob;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(cache.goal_cost(j) >= -1e-12);
        // redundant representation: J_j equals sum p*f over the argmin
        double recomputed = 0.0;
        for (const WeightedNode& w : cache.goal_argmin(j)) recomputed += w.prob * w.cost;
        CHECK(cache.goal_cost(j) == doctest::Approx(recomputed).epsilon(1e-9));
    }
    // total matches the mean of the per-goal costs
    CHECK(cache.total() ==
          doctest::Approx((cache.goal_cost(0) + cache.goal_cost(1)) / 2.0).epsilon(1e-9));
}

TEST_CASE("every committed marginal is non-negative (monotone objective)") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto [graph, inst] = testutil::random_instance(20, 7, 2, 7, 5, rng);
        const Assignment o = initial_assignment(inst);
        ObjectiveCache cache(inst, o);
        double prev = cache.total();
        for (int i = 0; i < inst.n_robots(); ++i) {
            if (cache.robot_assigned(i)) continue;
            const Edge e{i, (int)rng.uniform_int(0, 1)};
            const double delta = cache.marginal_decrease(e);
            CHECK(delta >= -1e-12);
            cache.commit(e);
            CHECK(cache.total() <= prev + 1e-12);
            prev = cache.total();
        }
    }
}

TEST_CASE("supermodularity: earlier sets see larger marginal decreases") {
    Rng rng(14);
    int checked = 0;
    while (checked < 100) {
        const auto [graph, inst] = testutil::random_instance(20, 6, 2, 6, 4, rng);
        const Assignment o = initial_assignment(inst);
        std::vector<int> free;
        for (int i = 0; i < inst.n_robots(); ++i)
            if (!o.uses_robot(i)) free.push_back(i);
        if (free.size() < 3) continue;

        // A subset of B: A = first edge, B = first two edges; x uses a third robot
        const Edge e1{free[0], (int)rng.uniform_int(0, 1)};
        const Edge e2{free[1], (int)rng.uniform_int(0, 1)};
        const Edge x{free[2], (int)rng.uniform_int(0, 1)};

        ObjectiveCache cache_a(inst, o);
        cache_a.commit(e1);
        ObjectiveCache cache_b(inst, o);
        cache_b.commit(e1);
        cache_b.commit(e2);
        CHECK(cache_a.marginal_decrease(x) >= cache_b.marginal_decrease(x) - 1e-9);
        ++checked;
    }
}

TEST_CASE("commit order does not change the total") {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [graph, inst] = testutil::random_instance(22, 6, 2, 6, 5, rng);
        const Assignment o = initial_assignment(inst);
        std::vector<Edge> edges;
        for (int i = 0; i < inst.n_robots(); ++i)
            if (!o.uses_robot(i)) edges.push_back({i, (int)rng.uniform_int(0, 1)});

        ObjectiveCache forward(inst, o);
        for (const Edge& e : edges) forward.commit(e);
        ObjectiveCache backward(inst, o);
        for (auto it = edges.rbegin(); it != edges.rend(); ++it) backward.commit(*it);
        CHECK(forward.total() == doctest::Approx(backward.total()).epsilon(1e-9));
    }
}

TEST_CASE("the pairwise loop touches exactly |P_j| * |belief| pairs") {
    Rng rng(16);
    const auto [graph, inst] = testutil::random_instance(25, 6, 2, 6, 5, rng);
    const Assignment o = initial_assignment(inst);
    ObjectiveCache cache(inst, o);
    for (int i = 0; i < inst.n_robots(); ++i) {
        if (cache.robot_assigned(i)) continue;
        for (int j = 0; j < 2; ++j) {
            const std::uint64_t before = cache.pair_ops();
            const std::uint64_t expected =
                cache.goal_argmin(j).size() * inst.beliefs[i].support.size();
            cache.marginal_decrease({i, j});
            CHECK(cache.pair_ops() - before == expected);
        }
    }
    // commits count the same pair work
    int robot = -1;
    for (int i = 0; i < inst.n_robots(); ++i)
        if (!cache.robot_assigned(i)) robot = i;
    const std::uint64_t before = cache.pair_ops();
    const std::uint64_t expected = cache.goal_argmin(0).size() * inst.beliefs[robot].support.size();
    cache.commit({robot, 0});
    CHECK(cache.pair_ops() - before == expected);
}

TEST_CASE("cache copies are independent") {
    Rng rng(17);
    const auto [graph, inst] = testutil::random_instance(20, 5, 2, 5, 4, rng);
    const Assignment o = initial_assignment(inst);
    ObjectiveCache cache(inst, o);
    ObjectiveCache clone = cache;
    int robot = -1;
    for (int i = 0; i < inst.n_robots(); ++i)
        if (!cache.robot_assigned(i)) robot = i;
    clone.commit({robot, 0});
    CHECK(cache.total() >= clone.total());
    CHECK(!cache.robot_assigned(robot));
    CHECK(clone.robot_assigned(robot));
}
