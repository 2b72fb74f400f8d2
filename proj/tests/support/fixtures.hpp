// SPDX-License-Identifier: Apache-2.0
// Fixture loading shared by the unit tests and the acceptance binary.
#pragma once

#include <string>
#include <vector>

#include "delta_lca/pipeline.hpp"

namespace delta_lca::testing {

inline const Engine& offline_engine() {
    static const Engine engine(Config::load(Config::default_path()), true);
    return engine;
}

inline std::string fixture_path(const std::string& rel) { return std::string(DELTA_LCA_FIXTURE_DIR) + "/" + rel; }

/// Parsed and prepared (enriched, estimated) design from the fixture tree.
inline DesignInventory load_design(const std::string& rel) {
    const Engine& e = offline_engine();
    const std::string path = fixture_path(rel);
    return e.prepare(e.parse(read_file(path), DesignFormat::Auto, rel));
}

inline const std::vector<std::string>& all_fixture_designs() {
    static const std::vector<std::string> files = {
        "boards/leonardo_like.brd",     "boards/mkr_fox_like.brd",    "boards/uno_wifi_like.brd",
        "boards/small_50x40.brd",       "designs/base.json",          "designs/base_plus_ic.json",
        "designs/disjoint_a.json",      "designs/disjoint_b.json",    "designs/footprint_basic.json",
        "designs/rules_a.json",         "designs/rules_b.json"};
    return files;
}

inline ComparisonOutcome compare(const DesignInventory& a, const DesignInventory& b, DirectionRequest d,
                                 const std::vector<UserRule>& rules = {}) {
    const Engine& e = offline_engine();
    return compare_designs(a, b, rules, d, e.edge_params(), e.config().time_budget_ms);
}

}  // namespace delta_lca::testing
