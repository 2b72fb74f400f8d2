// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "delta_lca/heuristics.hpp"
#include "delta_lca/inventory.hpp"

namespace delta_lca {

struct ProblemNode {
    std::string id;
    std::optional<double> weight;  // g CO2-eq; absent when the footprint is unknown

    bool operator==(const ProblemNode&) const = default;
};

struct ProblemEdge {
    std::string edge_id;
    EdgeKind kind = EdgeKind::UserRule;
    std::vector<std::size_t> a;  // indices into ComparisonProblem::a
    std::vector<std::size_t> b;  // indices into ComparisonProblem::b
    std::string rationale;

    bool unit() const { return a.size() == 1 && b.size() == 1; }
    bool operator==(const ProblemEdge&) const = default;
};

/// Integer program proving that the `a` side has at least the impact of the
/// `b` side. When proving B >= A the service builds it with the sides swapped.
///
///   max  sum b_j
///   C1   b_j <= sum_{e covers j} h_e + c_bj
///   C2   sum_{e uses i} h_e <= 1 - c_ai
///   C3   sum w_ai c_ai >= sum w_bj c_bj
struct ComparisonProblem {
    Dominance direction = Dominance::AGeB;
    std::vector<ProblemNode> a;
    std::vector<ProblemNode> b;
    std::vector<ProblemEdge> edges;

    /// b + c_a + c_b + h. Every instance carries a c-variable; it is fixed to 0
    /// when the instance has no weight.
    std::size_t variable_count() const { return b.size() + a.size() + b.size() + edges.size(); }
    /// One C1 row per b, one C2 row per a, one C3 row.
    std::size_t constraint_count() const { return b.size() + a.size() + 1; }

    std::optional<std::size_t> a_index(const std::string& id) const;
    std::optional<std::size_t> b_index(const std::string& id) const;

    bool operator==(const ComparisonProblem&) const = default;
};

/// Validates weights and indices. Throws ValidationError.
void validate_problem(const ComparisonProblem& p);

/// Adds an edge given by instance ids. Throws ValidationError for unknown ids
/// or empty sides.
void add_edge(ComparisonProblem& p, const HeuristicEdge& e);

/// Problem for `direction` from the reduced instances and heuristic edges.
/// Weights are per-piece footprints from the inventories. Edges of the other
/// direction are ignored.
ComparisonProblem build_problem(const ReducedDesigns& reduced, const DesignInventory& inv_a,
                                const DesignInventory& inv_b, std::span<const HeuristicEdge> edges,
                                Dominance direction);

struct Assignment {
    std::vector<std::uint8_t> b;
    std::vector<std::uint8_t> c_a;
    std::vector<std::uint8_t> c_b;
    std::vector<std::uint8_t> h;
    std::int64_t objective = 0;

    static Assignment zeros(const ComparisonProblem& p);
    bool operator==(const Assignment&) const = default;
};

/// C3 with a small relative tolerance for floating-point weights.
bool weight_balance_holds(double lhs, double rhs);

/// Independent constraint checker. Returns the list of violated rules; empty
/// means the assignment is feasible and its objective is consistent.
std::vector<std::string> check_assignment(const ComparisonProblem& p, const Assignment& x);

enum class Verdict { Proven, Inconclusive };

struct MatchResult {
    Assignment assignment;
    std::vector<std::string> a_delta;
    std::vector<std::string> b_delta;
    std::vector<std::string> unmatched_a;
    std::vector<std::string> unmatched_b;
    Verdict verdict = Verdict::Inconclusive;
    bool optimal = true;
    std::int64_t nodes_explored = 0;
    double wall_time_ms = 0.0;  // not serialized, see to_json

    std::int64_t objective() const { return assignment.objective; }
};

struct SolveOptions {
    std::int64_t time_budget_ms = 10000;
    /// Feasible start; ignored unless it passes check_assignment.
    std::optional<Assignment> warm_start;
};

/// Exact solver. One-to-one edges are handled by a min-cost-flow argument,
/// many-to-many edges by depth-first branch and bound on top of it.
MatchResult solve(const ComparisonProblem& p, const SolveOptions& opts = {});

/// Exhaustive enumeration over every variable. Refuses more than 24 variables.
std::int64_t brute_force_optimum(const ComparisonProblem& p);

struct Resolved {
    ComparisonProblem problem;
    MatchResult result;
};

/// Adds `rule` as an edge and re-solves, warm-started from `previous`.
Resolved apply_rule_and_resolve(const ComparisonProblem& p, const MatchResult& previous, const HeuristicEdge& rule,
                                std::int64_t time_budget_ms = 10000);

std::string_view to_string(Verdict v);

void to_json(nlohmann::json& j, const ComparisonProblem& p);
/// Assignment as id -> value maps.
nlohmann::json assignment_json(const ComparisonProblem& p, const Assignment& x);
/// Deterministic dump. Wall time is left out so equal inputs give equal bytes.
nlohmann::json result_json(const ComparisonProblem& p, const MatchResult& r);

}  // namespace delta_lca
