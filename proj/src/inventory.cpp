// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/inventory.hpp"

#include <set>

#include "delta_lca/error.hpp"

namespace delta_lca {

using nlohmann::json;

namespace {

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Passive: return "passive";
        case Family::Active: return "active";
        case Family::IC: return "ic";
        case Family::Misc: return "misc";
        case Family::BoardSubstrate: return "board_substrate";
        case Family::NonICAggregate: return "non_ic_aggregate";
    }
    return "misc";
}

std::string_view kind_name(SubKind k) {
    switch (k) {
        case SubKind::None: return "";
        case SubKind::Resistor: return "resistor";
        case SubKind::Capacitor: return "capacitor";
        case SubKind::Inductor: return "inductor";
        case SubKind::Diode: return "diode";
        case SubKind::Transistor: return "transistor";
        case SubKind::Other: return "other";
    }
    return "";
}

Family family_from(std::string_view s) {
    for (Family f : {Family::Passive, Family::Active, Family::IC, Family::Misc, Family::BoardSubstrate,
                     Family::NonICAggregate}) {
        if (family_name(f) == s) return f;
    }
    throw ValidationError("unknown category '" + std::string(s) + "'");
}

SubKind kind_from(std::string_view s) {
    for (SubKind k : {SubKind::None, SubKind::Resistor, SubKind::Capacitor, SubKind::Inductor, SubKind::Diode,
                      SubKind::Transistor, SubKind::Other}) {
        if (kind_name(k) == s) return k;
    }
    throw ValidationError("unknown part kind '" + std::string(s) + "'");
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        v.reset();
    } else {
        v = it->get<T>();
    }
}

}  // namespace

std::string to_string(PartCategory c) {
    std::string s(family_name(c.family));
    if (c.kind != SubKind::None) {
        s += ':';
        s += kind_name(c.kind);
    }
    return s;
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Unknown: return "unknown";
        case Provenance::TableLookup: return "table_lookup";
        case Provenance::AreaModel: return "area_model";
        case Provenance::MassModel: return "mass_model";
        case Provenance::UserSupplied: return "user_supplied";
    }
    return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
    for (Provenance p : {Provenance::Unknown, Provenance::TableLookup, Provenance::AreaModel,
                         Provenance::MassModel, Provenance::UserSupplied}) {
        if (to_string(p) == s) return p;
    }
    throw ValidationError("unknown footprint provenance '" + std::string(s) + "'");
}

const Part* DesignInventory::find(std::string_view part_id) const {
    for (const auto& p : parts) {
        if (p.part_id == part_id) return &p;
    }
    return nullptr;
}

std::vector<Violation> validate_inventory(const DesignInventory& inv) {
    std::vector<Violation> out;
    if (!(inv.board.area > 0.0)) out.push_back({"", "board area must be > 0"});
    if (inv.board.layer_count < 1 || inv.board.layer_count > 64) {
        out.push_back({"", "board layer_count must be in [1, 64]"});
    }
    if (!(inv.board.layer_thickness > 0.0)) out.push_back({"", "board layer_thickness must be > 0"});

    std::set<std::string> seen;
    for (const auto& p : inv.parts) {
        auto bad = [&](std::string rule) { out.push_back({p.part_id, std::move(rule)}); };
        if (p.part_id.empty()) bad("part_id must be nonempty");
        if (!seen.insert(p.part_id).second) bad("duplicate part_id");
        if (p.quantity < 1) bad("quantity must be >= 1");
        if (p.package_area < 0.0) bad("package_area must be >= 0");
        if (p.category.is_ic() && p.package_type.empty()) bad("IC part requires a package_type");

        const auto& a = p.attributes;
        auto nonneg = [&](const std::optional<double>& v, const char* name) {
            if (v && *v < 0.0) bad(std::string(name) + " must be >= 0");
        };
        nonneg(a.max_frequency, "max_frequency");
        nonneg(a.active_current_per_mhz, "active_current_per_mhz");
        nonneg(a.memory_size, "memory_size");
        nonneg(a.die_area, "die_area");
        nonneg(a.process_node, "process_node");
        nonneg(a.mass, "mass");
        if (a.pin_count && *a.pin_count < 0) bad("pin_count must be >= 0");
        if (a.die_area && *a.die_area > p.package_area) bad("die_area must not exceed package_area");

        if (p.footprint_estimate.has_value() != (p.footprint_provenance != Provenance::Unknown)) {
            bad("footprint_estimate present iff footprint_provenance is not unknown");
        }
        if (p.footprint_estimate && *p.footprint_estimate < 0.0) bad("footprint_estimate must be >= 0");
    }
    return out;
}

std::string instance_id(Side side, std::string_view design_id, std::string_view part_id, std::int64_t ordinal) {
    std::string id(1, side_char(side));
    id += ':';
    id += design_id;
    id += '/';
    id += part_id;
    id += '#';
    id += std::to_string(ordinal);
    return id;
}

std::vector<PartInstance> expand_instances(const DesignInventory& inv, Side side) {
    if (auto v = validate_inventory(inv); !v.empty()) {
        throw ValidationError("cannot expand invalid inventory '" + inv.design_id + "': " +
                              (v.front().part_id.empty() ? "" : v.front().part_id + ": ") + v.front().rule);
    }
    std::vector<PartInstance> out;
    for (const auto& p : inv.parts) {
        for (std::int64_t k = 0; k < p.quantity; ++k) {
            out.push_back({instance_id(side, inv.design_id, p.part_id, k), p.part_id, side, k});
        }
    }
    return out;
}

void to_json(json& j, const PartCategory& c) {
    j = json::object();
    j["category"] = family_name(c.family);
    if (c.kind != SubKind::None) j["kind"] = kind_name(c.kind);
}

void from_json(const json& j, PartCategory& c) {
    c.family = family_from(j.at("category").get<std::string>());
    auto it = j.find("kind");
    c.kind = (it == j.end() || it->is_null()) ? SubKind::None : kind_from(it->get<std::string>());
}

void to_json(json& j, const PartAttributes& a) {
    j = json::object();
    put_opt(j, "max_frequency", a.max_frequency);
    put_opt(j, "active_current_per_mhz", a.active_current_per_mhz);
    put_opt(j, "pin_count", a.pin_count);
    put_opt(j, "core_architecture", a.core_architecture);
    put_opt(j, "memory_size", a.memory_size);
    put_opt(j, "die_area", a.die_area);
    put_opt(j, "process_node", a.process_node);
    put_opt(j, "mass", a.mass);
}

void from_json(const json& j, PartAttributes& a) {
    get_opt(j, "max_frequency", a.max_frequency);
    get_opt(j, "active_current_per_mhz", a.active_current_per_mhz);
    get_opt(j, "pin_count", a.pin_count);
    get_opt(j, "core_architecture", a.core_architecture);
    get_opt(j, "memory_size", a.memory_size);
    get_opt(j, "die_area", a.die_area);
    get_opt(j, "process_node", a.process_node);
    get_opt(j, "mass", a.mass);
}

void to_json(json& j, const Part& p) {
    j = json::object();
    j["part_id"] = p.part_id;
    j["name"] = p.name;
    j["designator_prefix"] = p.designator_prefix;
    j["designators"] = p.designators;
    json cat = p.category;
    j.update(cat);
    j["package_type"] = p.package_type;
    j["package_area"] = p.package_area;
    j["quantity"] = p.quantity;
    j["attributes"] = p.attributes;
    j["footprint_estimate"] = p.footprint_estimate ? json(*p.footprint_estimate) : json(nullptr);
    j["footprint_provenance"] = to_string(p.footprint_provenance);
}

void from_json(const json& j, Part& p) {
    p.part_id = j.at("part_id").get<std::string>();
    p.name = j.value("name", std::string{});
    p.designator_prefix = j.value("designator_prefix", std::string{});
    p.designators = j.value("designators", std::vector<std::string>{});
    p.category = j.get<PartCategory>();
    p.package_type = j.value("package_type", std::string{});
    p.package_area = j.value("package_area", 0.0);
    p.quantity = j.value("quantity", std::int64_t{1});
    p.attributes = j.contains("attributes") ? j.at("attributes").get<PartAttributes>() : PartAttributes{};
    get_opt(j, "footprint_estimate", p.footprint_estimate);
    p.footprint_provenance = provenance_from_string(j.value("footprint_provenance", std::string{"unknown"}));
}

void to_json(json& j, const BoardSpec& b) {
    j = json{{"area_mm2", b.area},
             {"layers", b.layer_count},
             {"layer_thickness_mm", b.layer_thickness},
             {"substrate", b.substrate}};
}

void from_json(const json& j, BoardSpec& b) {
    b.area = j.at("area_mm2").get<double>();
    b.layer_count = j.at("layers").get<int>();
    b.layer_thickness = j.value("layer_thickness_mm", 1.0);
    b.substrate = j.value("substrate", std::string{"FR-4"});
}

void to_json(json& j, const DesignInventory& inv) {
    j = json{{"design_id", inv.design_id},
             {"source_file", inv.source_file},
             {"board", inv.board},
             {"parts", inv.parts}};
}

void from_json(const json& j, DesignInventory& inv) {
    inv.design_id = j.at("design_id").get<std::string>();
    inv.source_file = j.value("source_file", std::string{});
    inv.board = j.at("board").get<BoardSpec>();
    inv.parts = j.value("parts", std::vector<Part>{});
}

void to_json(json& j, const Violation& v) { j = json{{"part_id", v.part_id}, {"rule", v.rule}}; }

DesignInventory inventory_from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    try {
        return j.get<DesignInventory>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid inventory document: ") + e.what(), 0);
    }
}

std::string inventory_to_json_text(const DesignInventory& inv) { return json(inv).dump(2); }

}  // namespace delta_lca
