// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "delta_lca/catalog.hpp"
#include "delta_lca/eda_parser.hpp"
#include "delta_lca/ei_estimator.hpp"
#include "delta_lca/heuristics.hpp"
#include "delta_lca/match_solver.hpp"
#include "delta_lca/packages.hpp"
#include "delta_lca/spec_inference.hpp"

namespace delta_lca {

struct Config {
    std::filesystem::path factors;
    std::filesystem::path die_coefficients;
    std::filesystem::path process_nodes;
    std::filesystem::path package_aliases;

    std::string catalog_provider = "fixture";  // "fixture", "http" or "none"
    std::filesystem::path catalog_fixture_dir;
    ProviderConfig catalog_http;
    int catalog_parallelism = 4;

    std::string bind = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir;
    std::int64_t time_budget_ms = 10000;
    double epsilon = 0.10;

    /// Relative paths are resolved against the directory of `path`.
    static Config load(const std::filesystem::path& path);
    static Config from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    /// The config.json shipped in the data directory.
    static std::filesystem::path default_path();
};

/// Loaded tables plus the catalog provider. Read-only after construction.
class Engine {
public:
    explicit Engine(Config config, bool offline = false);

    const Config& config() const { return config_; }
    const FactorTables& factors() const { return factors_; }
    const DieCoefficientTable& die_coefficients() const { return dies_; }
    const ProcessNodeDataset& process_nodes() const { return nodes_; }
    const PackageNormalizer& normalizer() const { return normalizer_; }
    const CatalogProvider* catalog() const { return catalog_.get(); }
    ParseOptions parse_options() const;
    EdgeParams edge_params() const;

    DesignInventory parse(std::string_view bytes, DesignFormat format, const std::string& source_name,
                          std::vector<std::string>* warnings = nullptr) const;

    /// Catalog lookups for ICs, then die area and process node inference.
    /// Attributes already present are never overwritten.
    DesignInventory enrich(DesignInventory inv, std::vector<std::string>* warnings = nullptr) const;

    /// enrich + estimate_inventory.
    DesignInventory prepare(DesignInventory inv, std::vector<std::string>* warnings = nullptr) const;

private:
    Config config_;
    FactorTables factors_;
    DieCoefficientTable dies_;
    ProcessNodeDataset nodes_;
    PackageNormalizer normalizer_;
    std::unique_ptr<CatalogProvider> catalog_;
};

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

enum class Comparator { AGreaterOrEqual, BGreaterOrEqual, Equivalent };

struct RuleSelection {
    std::string part_id;
    std::int64_t quantity = 1;

    bool operator==(const RuleSelection&) const = default;
};

struct UserRule {
    std::string rule_id;
    std::vector<RuleSelection> a_selection;
    std::vector<RuleSelection> b_selection;
    Comparator comparator = Comparator::AGreaterOrEqual;
    std::string note;

    bool operator==(const UserRule&) const = default;
};

std::string_view to_string(Comparator c);
Comparator comparator_from_string(std::string_view s);

void to_json(nlohmann::json& j, const UserRule& r);
void from_json(const nlohmann::json& j, UserRule& r);

/// Reads `{"rules": [...]}` or a bare list.
std::vector<UserRule> rules_from_json(const nlohmann::json& j);

/// Checks selections against part quantities. Throws ValidationError.
void validate_rule(const UserRule& rule, const DesignInventory& a, const DesignInventory& b);

enum class DirectionRequest { AGeB, BGeA, Auto };

DirectionRequest direction_from_string(std::string_view s);

struct ComparisonOutcome {
    ReducedDesigns reduced;
    std::vector<HeuristicEdge> edges;  // kept heuristic edges followed by user-rule edges
    std::vector<Conflict> conflicts;
    ComparisonProblem problem;
    MatchResult result;
};

/// cancel -> user equivalences -> edges -> prune -> user edges -> solve.
/// Inventories must already be prepared. With Auto, A >= B is tried first and
/// B >= A only when the first is not proven; the A >= B outcome is returned if
/// neither direction is proven.
ComparisonOutcome compare_designs(const DesignInventory& a, const DesignInventory& b, std::span<const UserRule> rules,
                                  DirectionRequest direction, const EdgeParams& params, std::int64_t time_budget_ms);

/// Full report: result, cancellation, edges, partial totals, per-side tables
/// (unmatched first), rules and solver stats.
nlohmann::json comparison_report(const ComparisonOutcome& outcome, const DesignInventory& a, const DesignInventory& b,
                                 std::span<const UserRule> rules);

}  // namespace delta_lca
