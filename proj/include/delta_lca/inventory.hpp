// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace delta_lca {

enum class Family { Passive, Active, IC, Misc, BoardSubstrate, NonICAggregate };

/// Sub-kind for passive and active parts. `None` for every other family.
enum class SubKind { None, Resistor, Capacitor, Inductor, Diode, Transistor, Other };

struct PartCategory {
    Family family = Family::Misc;
    SubKind kind = SubKind::None;

    static PartCategory passive(SubKind k) { return {Family::Passive, k}; }
    static PartCategory active(SubKind k) { return {Family::Active, k}; }
    static PartCategory ic() { return {Family::IC, SubKind::None}; }
    static PartCategory misc() { return {Family::Misc, SubKind::None}; }
    static PartCategory board() { return {Family::BoardSubstrate, SubKind::None}; }

    bool is_passive() const { return family == Family::Passive; }
    bool is_ic() const { return family == Family::IC; }
    bool is_diode() const { return family == Family::Active && kind == SubKind::Diode; }

    bool operator==(const PartCategory&) const = default;
};

std::string to_string(PartCategory c);

enum class Provenance { Unknown, TableLookup, AreaModel, MassModel, UserSupplied };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Optional typed attributes. Units: MHz, mA/MHz, kB, mm², nm, g.
struct PartAttributes {
    std::optional<double> max_frequency;
    std::optional<double> active_current_per_mhz;
    std::optional<std::int64_t> pin_count;
    std::optional<std::string> core_architecture;
    std::optional<double> memory_size;
    std::optional<double> die_area;
    std::optional<double> process_node;
    std::optional<double> mass;

    bool operator==(const PartAttributes&) const = default;
};

struct Part {
    std::string part_id;
    std::string name;
    std::string designator_prefix;
    std::vector<std::string> designators;
    PartCategory category;
    std::string package_type;
    double package_area = 0.0;  // mm²
    std::int64_t quantity = 1;
    PartAttributes attributes;
    std::optional<double> footprint_estimate;  // g CO2-eq per piece
    Provenance footprint_provenance = Provenance::Unknown;

    bool operator==(const Part&) const = default;
};

struct BoardSpec {
    double area = 0.0;  // mm²
    int layer_count = 1;
    double layer_thickness = 1.0;  // mm
    std::string substrate = "FR-4";

    bool operator==(const BoardSpec&) const = default;
};

struct DesignInventory {
    std::string design_id;
    std::string source_file;
    BoardSpec board;
    std::vector<Part> parts;

    const Part* find(std::string_view part_id) const;
    bool operator==(const DesignInventory&) const = default;
};

enum class Side { A, B };

inline char side_char(Side s) { return s == Side::A ? 'A' : 'B'; }

struct PartInstance {
    std::string instance_id;
    std::string part_id;
    Side design_side = Side::A;
    std::int64_t ordinal = 0;

    bool operator==(const PartInstance&) const = default;
};

struct Violation {
    std::string part_id;  // empty for board-level and design-level rules
    std::string rule;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_inventory(const DesignInventory& inv);

/// Deterministic instance id for the `ordinal`-th unit of a part.
std::string instance_id(Side side, std::string_view design_id, std::string_view part_id,
                        std::int64_t ordinal);

/// One instance per unit of quantity. Throws ValidationError on an invalid inventory.
std::vector<PartInstance> expand_instances(const DesignInventory& inv, Side side);

// Neutral JSON format.
void to_json(nlohmann::json& j, const PartCategory& c);
void from_json(const nlohmann::json& j, PartCategory& c);
void to_json(nlohmann::json& j, const PartAttributes& a);
void from_json(const nlohmann::json& j, PartAttributes& a);
void to_json(nlohmann::json& j, const Part& p);
void from_json(const nlohmann::json& j, Part& p);
void to_json(nlohmann::json& j, const BoardSpec& b);
void from_json(const nlohmann::json& j, BoardSpec& b);
void to_json(nlohmann::json& j, const DesignInventory& inv);
void from_json(const nlohmann::json& j, DesignInventory& inv);
void to_json(nlohmann::json& j, const Violation& v);

DesignInventory inventory_from_json_text(std::string_view text);
std::string inventory_to_json_text(const DesignInventory& inv);

}  // namespace delta_lca
