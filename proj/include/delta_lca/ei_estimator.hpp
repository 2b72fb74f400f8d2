// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delta_lca/inventory.hpp"

namespace delta_lca {

struct MassFactor {
    double ef = 0.0;     // g CO2-eq per reference mass
    double m_ref = 0.0;  // g
    double loss = 1.0;   // dimensionless, (0, 1]
};

/// Emission factors loaded from factors.json. All values g CO2-eq.
struct FactorTables {
    std::map<std::pair<SubKind, std::string>, double> passive;  // per piece, by (kind, size code)
    std::map<std::string, double> substrate_per_mm2_per_mm;     // by substrate name, per mm² per 1 mm layer
    std::map<double, double> ic_per_mm2_by_node;                // node nm -> per mm² of die
    std::map<std::string, MassFactor> mass_factors;             // by category string ("passive:capacitor", "misc")

    static FactorTables from_json(const nlohmann::json& j);
    static FactorTables load(const std::string& path);

    /// Nodes of the IC factor table in ascending order.
    std::vector<double> node_ladder() const;
};

/// Result of one estimate. `grams` is empty exactly when provenance is Unknown.
struct Estimate {
    std::optional<double> grams;
    Provenance provenance = Provenance::Unknown;
    std::vector<std::string> warnings;

    static Estimate unknown(std::string why) { return {std::nullopt, Provenance::Unknown, {std::move(why)}}; }
};

Estimate estimate_passive(SubKind kind, std::string_view size_code, const FactorTables& tables);

/// area × layers × thickness × substrate factor. Throws std::invalid_argument
/// for a board that violates BoardSpec invariants.
Estimate estimate_substrate(const BoardSpec& board, const FactorTables& tables);

/// die_area × per-mm² factor of the requested node; a node missing from the
/// table uses the nearest listed node in log space (ties to the smaller node).
Estimate estimate_ic(double die_area, double node_nm, const FactorTables& tables);

/// m·ef / (m_ref·L) with the factors registered for `category`.
Estimate estimate_by_mass(double mass, PartCategory category, const FactorTables& tables);

/// Best available model for one part. User-supplied values are kept.
Estimate estimate_part(const Part& part, const BoardSpec& board, const FactorTables& tables);

/// Copy of `inv` with footprint_estimate / footprint_provenance filled in.
DesignInventory estimate_inventory(DesignInventory inv, const FactorTables& tables,
                                   std::vector<std::string>* warnings = nullptr);

struct FootprintTotal {
    double total = 0.0;  // partial: covered parts only
    std::vector<std::string> covered;
    std::vector<std::string> uncovered;
};

FootprintTotal total_footprint(const DesignInventory& inv);

void to_json(nlohmann::json& j, const FootprintTotal& t);

}  // namespace delta_lca
