// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "delta_lca/inventory.hpp"

namespace delta_lca {

enum class EdgeKind {
    PackageSizePassive = 1,
    SameCoreChip = 2,
    EquivalentProcess = 3,
    DieSize = 4,
    ProcessNode = 5,
    DiodeSize = 6,
    UserRule = 7,
};

std::string_view to_string(EdgeKind k);
EdgeKind edge_kind_from_string(std::string_view s);

/// Which side the edge claims has the larger impact.
enum class Dominance { AGeB, BGeA };

/// Dominance claim from a set of A-instances over a set of B-instances (or the
/// reverse, per `direction`). Kinds 1-6 are one-to-one.
struct HeuristicEdge {
    std::string edge_id;
    EdgeKind kind = EdgeKind::UserRule;
    Dominance direction = Dominance::AGeB;
    std::vector<std::string> a_instances;
    std::vector<std::string> b_instances;
    std::string rationale;

    bool operator==(const HeuristicEdge&) const = default;
};

struct CancelledPair {
    std::string a_part_id;
    std::string b_part_id;
    std::int64_t quantity = 0;
    int equivalence = 0;  // 1, 2 or 3; 0 for a user "equivalent" rule

    bool operator==(const CancelledPair&) const = default;
};

struct CancellationReport {
    std::vector<CancelledPair> pairs;

    std::int64_t total_quantity() const;
};

struct ReducedDesigns {
    std::vector<PartInstance> a;
    std::vector<PartInstance> b;
    CancellationReport report;
};

/// Equivalence predicates used for cancellation (kinds 1-3).
bool same_passive_package(const Part& a, const Part& b);
bool same_core_chip(const Part& a, const Part& b);
bool equivalent_process(const Part& a, const Part& b);

/// Ordering-code suffix stripped at the last '-', e.g. "ATMEGA32U4-AU" -> "ATMEGA32U4".
std::string name_stem(std::string_view name);

/// Removes min(qtyA, qtyB) instances of every equivalent part pair from both
/// sides, trying kinds 1, 2, 3 in that order. Lowest ordinals are removed first.
ReducedDesigns cancel_identical(const DesignInventory& a, const DesignInventory& b);

/// Removes the listed instances from both sides and records them as a user
/// equivalence. Throws Error when an id is not present.
void cancel_equivalent(ReducedDesigns& reduced, std::span<const std::string> a_ids,
                       std::span<const std::string> b_ids);

struct EdgeParams {
    double epsilon = 0.10;           // dominance margin for die and diode size
    std::vector<double> node_ladder;  // ascending process nodes, nm
};

/// Die-size, process-node and diode-size edges in both directions between
/// the remaining instances. Only parts with the needed attributes get edges.
/// Output is sorted by edge_id.
std::vector<HeuristicEdge> generate_edges(std::span<const PartInstance> a, std::span<const PartInstance> b,
                                          const DesignInventory& inv_a, const DesignInventory& inv_b,
                                          const EdgeParams& params);

struct Conflict {
    std::string a_instance;
    std::string b_instance;
    std::vector<std::string> rationales;
};

struct PruneResult {
    std::vector<HeuristicEdge> kept;
    std::vector<Conflict> conflicts;
};

/// Drops every one-to-one edge between an instance pair that carries claims
/// in both directions.
PruneResult prune_conflicts(std::vector<HeuristicEdge> edges);

void to_json(nlohmann::json& j, const HeuristicEdge& e);
void from_json(const nlohmann::json& j, HeuristicEdge& e);
void to_json(nlohmann::json& j, const CancelledPair& c);
void to_json(nlohmann::json& j, const Conflict& c);

/// `{edges: [...], conflicts: [...], cancelled: [...]}`
nlohmann::json edge_dump(std::span<const HeuristicEdge> edges, std::span<const Conflict> conflicts,
                         const CancellationReport& cancelled);

}  // namespace delta_lca
