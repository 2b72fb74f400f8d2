// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "../support/problems.hpp"
#include "delta_lca/error.hpp"
#include "delta_lca/match_solver.hpp"

using namespace delta_lca;
using delta_lca::testing::random_problem;
using delta_lca::testing::toy_problem;
using delta_lca::testing::unit_edge;

namespace {

double weighted(const std::vector<ProblemNode>& nodes, const std::vector<std::uint8_t>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (c[i]) s += nodes[i].weight.value_or(0.0);
    return s;
}

}  // namespace

TEST(Toy, CountsFollowTheFormulation) {
    const auto p = toy_problem();
    EXPECT_EQ(p.variable_count(), 17u);
    EXPECT_EQ(p.constraint_count(), 10u);
}

TEST(Toy, OptimumIsThreeAndFeasible) {
    const auto p = toy_problem();
    const auto r = solve(p);
    EXPECT_EQ(r.objective(), 3);
    EXPECT_TRUE(r.optimal);
    EXPECT_TRUE(check_assignment(p, r.assignment).empty());
    EXPECT_EQ(r.assignment.b, (std::vector<std::uint8_t>{0, 1, 1, 1}));
    EXPECT_EQ(r.verdict, Verdict::Inconclusive);
    EXPECT_EQ(r.unmatched_b, std::vector<std::string>{"b1"});
    EXPECT_EQ(brute_force_optimum(p), 3);
}

TEST(Toy, WitnessFromTableIsFeasible) {
    const auto p = toy_problem();
    Assignment x = Assignment::zeros(p);
    x.b = {0, 1, 1, 1};
    x.h = {1, 0, 1, 0};      // h22, h34
    x.c_a = {0, 0, 0, 1, 1};  // a4, a5
    x.c_b = {0, 0, 1, 0};     // b3
    x.objective = 3;
    EXPECT_TRUE(check_assignment(p, x).empty());
    EXPECT_DOUBLE_EQ(weighted(p.a, x.c_a), 20.0);
    EXPECT_DOUBLE_EQ(weighted(p.b, x.c_b), 10.0);
}

TEST(Toy, SolverBalanceHolds) {
    const auto p = toy_problem();
    const auto r = solve(p);
    EXPECT_GE(weighted(p.a, r.assignment.c_a), weighted(p.b, r.assignment.c_b));
}

TEST(Checker, FlagsEachConstraint) {
    const auto p = toy_problem();
    Assignment x = Assignment::zeros(p);
    x.b[0] = 1;
    x.objective = 1;
    EXPECT_FALSE(check_assignment(p, x).empty()) << "b1 has no cover";

    x = Assignment::zeros(p);
    x.h = {1, 1, 0, 0};  // a2 used twice
    EXPECT_FALSE(check_assignment(p, x).empty());

    x = Assignment::zeros(p);
    x.c_a[0] = 1;  // a1 has no weight
    EXPECT_FALSE(check_assignment(p, x).empty());

    x = Assignment::zeros(p);
    x.c_b[2] = 1;
    x.b[2] = 1;
    x.objective = 1;  // nothing pays for b3
    EXPECT_FALSE(check_assignment(p, x).empty());

    x = Assignment::zeros(p);
    x.objective = 2;
    EXPECT_FALSE(check_assignment(p, x).empty()) << "objective must equal sum b";

    x = Assignment::zeros(p);
    x.h.pop_back();
    EXPECT_FALSE(check_assignment(p, x).empty()) << "shape";
}

TEST(Checker, ZeroAssignmentAlwaysFeasible) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_problem(rng);
        EXPECT_TRUE(check_assignment(p, Assignment::zeros(p)).empty());
    }
}

TEST(Solver, EmptyProblem) {
    ComparisonProblem p;
    EXPECT_EQ(solve(p).objective(), 0);
    EXPECT_EQ(brute_force_optimum(p), 0);
    EXPECT_EQ(solve(p).verdict, Verdict::Proven);
}

TEST(Solver, NoEdgesNoWeights) {
    ComparisonProblem p;
    p.a = {{"a1", std::nullopt}};
    p.b = {{"b1", std::nullopt}, {"b2", std::nullopt}};
    EXPECT_EQ(solve(p).objective(), 0);
    EXPECT_EQ(brute_force_optimum(p), 0);
}

TEST(Solver, SingleEdge) {
    ComparisonProblem p;
    p.a = {{"a1", std::nullopt}};
    p.b = {{"b1", std::nullopt}};
    p.edges = {unit_edge("e", 0, 0)};
    EXPECT_EQ(p.variable_count(), 4u);
    const auto r = solve(p);
    EXPECT_EQ(r.objective(), 1);
    EXPECT_EQ(r.verdict, Verdict::Proven);
    EXPECT_EQ(brute_force_optimum(p), 1);
}

TEST(Solver, ManyToManyEdgeCoversAllItsTargets) {
    ComparisonProblem p;
    p.a = {{"a1", std::nullopt}, {"a2", std::nullopt}};
    p.b = {{"b1", std::nullopt}, {"b2", std::nullopt}, {"b3", std::nullopt}};
    ProblemEdge e{"rule", EdgeKind::UserRule, {0, 1}, {0, 1, 2}, ""};
    p.edges = {e, unit_edge("u", 0, 0)};
    const auto r = solve(p);
    EXPECT_EQ(r.objective(), 3);
    EXPECT_EQ(brute_force_optimum(p), 3);
    EXPECT_TRUE(check_assignment(p, r.assignment).empty());
}

TEST(Solver, WeightOnlyMatching) {
    ComparisonProblem p;
    p.a = {{"a1", 5.0}};
    p.b = {{"b1", 2.0}, {"b2", 2.0}, {"b3", 2.0}};
    const auto r = solve(p);
    EXPECT_EQ(r.objective(), 2);
    EXPECT_EQ(brute_force_optimum(p), 2);
}

TEST(Solver, WeightToleranceAcceptsFloatingSums) {
    ComparisonProblem p;
    p.a = {{"a1", 0.3}};
    p.b = {{"b1", 0.1}, {"b2", 0.2}};
    EXPECT_EQ(solve(p).objective(), 2);
}

TEST(Solver, OracleEquivalenceOnRandomProblems) {
    std::mt19937_64 rng(20240601);
    for (int t = 0; t < 200; ++t) {
        const auto p = random_problem(rng);
        ASSERT_LE(p.variable_count(), 18u);
        const auto r = solve(p);
        ASSERT_TRUE(check_assignment(p, r.assignment).empty()) << "case " << t;
        ASSERT_EQ(r.objective(), brute_force_optimum(p)) << "case " << t << "\n" << nlohmann::json(p).dump();
        ASSERT_TRUE(r.optimal);
    }
}

TEST(Solver, OracleEquivalenceUpToTwentyVariables) {
    std::mt19937_64 rng(99);
    delta_lca::testing::RandomSpec spec;
    spec.max_variables = 20;
    for (int t = 0; t < 40; ++t) {
        const auto p = random_problem(rng, spec);
        ASSERT_EQ(solve(p).objective(), brute_force_optimum(p)) << "case " << t;
    }
}

TEST(Solver, Deterministic) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const auto p = random_problem(rng);
        const auto r1 = solve(p);
        const auto r2 = solve(p);
        EXPECT_EQ(r1.assignment, r2.assignment);
        EXPECT_EQ(result_json(p, r1).dump(), result_json(p, r2).dump());
    }
}

TEST(Solver, EdgeAdditionNeverLowersOptimum) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 60; ++t) {
        auto p = random_problem(rng);
        const auto before = solve(p).objective();
        p.edges.push_back(unit_edge("extra", rng() % p.a.size(), rng() % p.b.size()));
        EXPECT_GE(solve(p).objective(), before);
    }
}

TEST(Solver, VerdictMatchesUnmatchedB) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_problem(rng);
        const auto r = solve(p);
        EXPECT_EQ(r.verdict == Verdict::Proven, r.unmatched_b.empty());
        EXPECT_EQ(r.b_delta.size() + r.unmatched_b.size(), p.b.size());
        EXPECT_EQ(static_cast<std::int64_t>(r.b_delta.size()), r.objective());
    }
}

TEST(Solver, BenchmarkWithinFiveSeconds) {
    const auto p = delta_lca::testing::benchmark_problem(42);
    EXPECT_GE(p.variable_count(), 2400u);
    EXPECT_LE(p.variable_count(), 2600u);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = solve(p);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(r.optimal);
    EXPECT_LT(secs, 5.0);
    EXPECT_TRUE(check_assignment(p, r.assignment).empty());
}

TEST(Solver, ExhaustedBudgetKeepsFeasibleIncumbent) {
    const auto p = delta_lca::testing::benchmark_problem(8, 300, 300, 250, 40);
    SolveOptions o;
    o.time_budget_ms = 0;
    const auto r = solve(p, o);
    EXPECT_TRUE(check_assignment(p, r.assignment).empty());
}

TEST(BruteForce, RefusesLargeProblems) {
    ComparisonProblem p;
    for (int i = 0; i < 9; ++i) p.a.push_back({"a" + std::to_string(i), std::nullopt});
    for (int j = 0; j < 8; ++j) p.b.push_back({"b" + std::to_string(j), std::nullopt});
    ASSERT_EQ(p.variable_count(), 25u);
    EXPECT_THROW(brute_force_optimum(p), std::invalid_argument);
}

TEST(Rules, FlipVerdictWhenCoveringLastUnmatched) {
    const auto p = toy_problem();
    const auto r = solve(p);
    HeuristicEdge rule{"rule1", EdgeKind::UserRule, Dominance::AGeB, {"a1"}, {"b1"}, "user"};
    const auto res = apply_rule_and_resolve(p, r, rule);
    EXPECT_EQ(res.result.objective(), 4);
    EXPECT_EQ(res.result.verdict, Verdict::Proven);
    EXPECT_EQ(res.problem.edges.size(), p.edges.size() + 1);
}

TEST(Rules, RedundantRuleLeavesObjective) {
    const auto p = toy_problem();
    const auto r = solve(p);
    HeuristicEdge rule{"dup", EdgeKind::UserRule, Dominance::AGeB, {"a2"}, {"b2"}, ""};
    EXPECT_EQ(apply_rule_and_resolve(p, r, rule).result.objective(), 3);
}

TEST(Rules, UnknownInstanceRejected) {
    const auto p = toy_problem();
    const auto r = solve(p);
    HeuristicEdge rule{"bad", EdgeKind::UserRule, Dominance::AGeB, {"a9"}, {"b1"}, ""};
    EXPECT_THROW(apply_rule_and_resolve(p, r, rule), ValidationError);
    rule.a_instances = {"a1"};
    rule.direction = Dominance::BGeA;
    EXPECT_THROW(apply_rule_and_resolve(p, r, rule), ValidationError);
}

TEST(Rules, MonotoneOverRandomCases) {
    std::mt19937_64 rng(1234);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_problem(rng);
        const auto before = solve(p);
        const auto rule = delta_lca::testing::random_rule(rng, p, "r" + std::to_string(t));
        const auto after = apply_rule_and_resolve(p, before, rule);
        ASSERT_GE(after.result.objective(), before.objective()) << "case " << t;
        if (after.problem.variable_count() <= 20) {
            ASSERT_EQ(after.result.objective(), brute_force_optimum(after.problem)) << "case " << t;
        }
    }
}

TEST(Problem, BgeAEdgesAreSwapped) {
    ComparisonProblem p;
    p.direction = Dominance::BGeA;
    p.a = {{"B:x#1", std::nullopt}};
    p.b = {{"A:y#1", std::nullopt}};
    add_edge(p, HeuristicEdge{"e", EdgeKind::DieSize, Dominance::BGeA, {"A:y#1"}, {"B:x#1"}, ""});
    ASSERT_EQ(p.edges.size(), 1u);
    EXPECT_EQ(p.edges[0].a, std::vector<std::size_t>{0});
    EXPECT_EQ(p.edges[0].b, std::vector<std::size_t>{0});
}

TEST(Problem, ValidationRejectsNegativeWeightsAndBadIndices) {
    auto p = toy_problem();
    p.a[0].weight = -1.0;
    EXPECT_THROW(validate_problem(p), ValidationError);
    p = toy_problem();
    p.edges[0].b = {42};
    EXPECT_THROW(validate_problem(p), ValidationError);
}

TEST(Problem, JsonDumpNamesVariables) {
    const auto p = toy_problem();
    const auto r = solve(p);
    const auto j = result_json(p, r);
    EXPECT_EQ(j.at("objective"), 3);
    EXPECT_EQ(j.at("verdict"), "inconclusive");
    EXPECT_FALSE(j.contains("wall_time_ms"));
    EXPECT_EQ(j.at("assignment").at("h").size(), 4u);
}
