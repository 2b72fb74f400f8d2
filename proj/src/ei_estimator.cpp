// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/ei_estimator.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "delta_lca/error.hpp"

namespace delta_lca {

using nlohmann::json;

namespace {

SubKind passive_kind(std::string_view s) {
    if (s == "resistor") return SubKind::Resistor;
    if (s == "capacitor") return SubKind::Capacitor;
    if (s == "inductor") return SubKind::Inductor;
    throw ConfigError("unknown passive kind '" + std::string(s) + "' in factor table");
}

void require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(what + " must be > 0");
}

}  // namespace

FactorTables FactorTables::from_json(const json& j) {
    FactorTables t;
    for (const auto& [kind, sizes] : j.at("passive").items()) {
        if (kind.rfind('_', 0) == 0) continue;
        for (const auto& [size, value] : sizes.items()) {
            require_positive(value.get<double>(), "passive factor " + kind + "/" + size);
            t.passive[{passive_kind(kind), size}] = value.get<double>();
        }
    }
    for (const auto& [name, value] : j.at("substrate").items()) {
        require_positive(value.get<double>(), "substrate factor " + name);
        t.substrate_per_mm2_per_mm[name] = value.get<double>();
    }
    for (const auto& [node, value] : j.at("ic_per_mm2_by_node").items()) {
        require_positive(value.get<double>(), "IC factor for node " + node);
        t.ic_per_mm2_by_node[std::stod(node)] = value.get<double>();
    }
    if (auto it = j.find("mass_factors"); it != j.end()) {
        for (const auto& [cat, f] : it->items()) {
            MassFactor m{f.at("ef").get<double>(), f.at("m_ref").get<double>(), f.value("loss", 1.0)};
            require_positive(m.ef, "mass ef for " + cat);
            require_positive(m.m_ref, "mass m_ref for " + cat);
            if (!(m.loss > 0.0 && m.loss <= 1.0)) throw ConfigError("loss factor for " + cat + " must be in (0, 1]");
            t.mass_factors[cat] = m;
        }
    }
    // Opt-in per-size overrides, e.g. a 1206 resistor value not listed in the base table.
    if (j.value("apply_passive_overrides", false)) {
        for (const auto& [kind, sizes] : j.at("passive_overrides").items()) {
            for (const auto& [size, value] : sizes.items()) {
                require_positive(value.get<double>(), "passive override " + kind + "/" + size);
                t.passive[{passive_kind(kind), size}] = value.get<double>();
            }
        }
    }
    return t;
}

FactorTables FactorTables::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open factor tables " + path);
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("bad factor tables " + path + ": " + e.what());
    }
}

std::vector<double> FactorTables::node_ladder() const {
    std::vector<double> out;
    for (const auto& [node, f] : ic_per_mm2_by_node) out.push_back(node);
    return out;
}

Estimate estimate_passive(SubKind kind, std::string_view size_code, const FactorTables& tables) {
    auto it = tables.passive.find({kind, std::string(size_code)});
    if (it == tables.passive.end()) return Estimate::unknown("no passive factor for size " + std::string(size_code));
    return {it->second, Provenance::TableLookup, {}};
}

Estimate estimate_substrate(const BoardSpec& board, const FactorTables& tables) {
    if (!(board.area > 0.0) || board.layer_count < 1 || !(board.layer_thickness > 0.0)) {
        throw std::invalid_argument("board area, layer count and thickness must be positive");
    }
    auto it = tables.substrate_per_mm2_per_mm.find(board.substrate);
    if (it == tables.substrate_per_mm2_per_mm.end()) {
        return Estimate::unknown("no factor for substrate " + board.substrate);
    }
    return {board.area * board.layer_count * board.layer_thickness * it->second, Provenance::AreaModel, {}};
}

Estimate estimate_ic(double die_area, double node_nm, const FactorTables& tables) {
    if (!(die_area >= 0.0) || !(node_nm > 0.0)) throw std::invalid_argument("die area and node must be positive");
    if (tables.ic_per_mm2_by_node.empty()) return Estimate::unknown("no IC factors configured");

    const double* factor = nullptr;
    double used_node = 0.0;
    if (auto it = tables.ic_per_mm2_by_node.find(node_nm); it != tables.ic_per_mm2_by_node.end()) {
        factor = &it->second;
        used_node = it->first;
    } else {
        double best = 0.0;
        for (const auto& [node, f] : tables.ic_per_mm2_by_node) {
            const double d = std::abs(std::log(node) - std::log(node_nm));
            // Ascending iteration keeps the smaller node on ties; the slack
            // absorbs round-off in the logarithms.
            if (!factor || d < best - 1e-12) {
                factor = &f;
                used_node = node;
                best = d;
            }
        }
    }
    Estimate e{die_area * *factor, Provenance::AreaModel, {}};
    if (used_node != node_nm) {
        e.warnings.push_back("node " + std::to_string(node_nm) + " nm not tabulated, used " +
                             std::to_string(used_node) + " nm");
    }
    if (die_area == 0.0) e.warnings.push_back("zero die area");
    return e;
}

Estimate estimate_by_mass(double mass, PartCategory category, const FactorTables& tables) {
    if (!(mass >= 0.0)) throw std::invalid_argument("mass must be nonnegative");
    auto it = tables.mass_factors.find(to_string(category));
    if (it == tables.mass_factors.end()) {
        PartCategory family_only{category.family, SubKind::None};
        it = tables.mass_factors.find(to_string(family_only));
    }
    if (it == tables.mass_factors.end()) return Estimate::unknown("no mass factors for " + to_string(category));
    const MassFactor& f = it->second;
    return {mass * f.ef / (f.m_ref * f.loss), Provenance::MassModel, {}};
}

Estimate estimate_part(const Part& part, const BoardSpec& board, const FactorTables& tables) {
    if (part.footprint_provenance == Provenance::UserSupplied && part.footprint_estimate) {
        return {part.footprint_estimate, Provenance::UserSupplied, {}};
    }
    const auto& a = part.attributes;
    Estimate e = Estimate::unknown(part.part_id + ": insufficient information");
    switch (part.category.family) {
        case Family::BoardSubstrate: {
            BoardSpec b = board;
            b.area = part.package_area > 0.0 ? part.package_area : board.area;
            if (!part.package_type.empty()) b.substrate = part.package_type;
            e = estimate_substrate(b, tables);
            break;
        }
        case Family::Passive:
            e = estimate_passive(part.category.kind, part.package_type, tables);
            break;
        case Family::IC:
            if (a.die_area && a.process_node) e = estimate_ic(*a.die_area, *a.process_node, tables);
            break;
        default:
            break;
    }
    if (e.provenance == Provenance::Unknown && a.mass) {
        Estimate by_mass = estimate_by_mass(*a.mass, part.category, tables);
        if (by_mass.grams) e = std::move(by_mass);
    }
    return e;
}

DesignInventory estimate_inventory(DesignInventory inv, const FactorTables& tables, std::vector<std::string>* warnings) {
    for (auto& p : inv.parts) {
        Estimate e = estimate_part(p, inv.board, tables);
        p.footprint_estimate = e.grams;
        p.footprint_provenance = e.grams ? e.provenance : Provenance::Unknown;
        if (warnings) {
            for (auto& w : e.warnings) warnings->push_back(std::move(w));
        }
    }
    return inv;
}

FootprintTotal total_footprint(const DesignInventory& inv) {
    FootprintTotal t;
    for (const auto& p : inv.parts) {
        if (p.footprint_estimate && p.footprint_provenance != Provenance::Unknown) {
            t.total += *p.footprint_estimate * static_cast<double>(p.quantity);
            t.covered.push_back(p.part_id);
        } else {
            t.uncovered.push_back(p.part_id);
        }
    }
    return t;
}

void to_json(json& j, const FootprintTotal& t) {
    j = json{{"total_g_co2e", t.total}, {"partial", !t.uncovered.empty()}, {"covered", t.covered},
             {"uncovered", t.uncovered}};
}

}  // namespace delta_lca
