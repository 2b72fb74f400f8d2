// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/heuristics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "delta_lca/error.hpp"

namespace delta_lca {

using nlohmann::json;

namespace {

constexpr std::pair<EdgeKind, std::string_view> kKindNames[] = {
    {EdgeKind::PackageSizePassive, "package_size_passive"},
    {EdgeKind::SameCoreChip, "same_core_chip"},
    {EdgeKind::EquivalentProcess, "equivalent_process"},
    {EdgeKind::DieSize, "die_size"},
    {EdgeKind::ProcessNode, "process_node"},
    {EdgeKind::DiodeSize, "diode_size"},
    {EdgeKind::UserRule, "user_rule"},
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool within(double x, double y, double rel) {
    const double m = std::max(std::abs(x), std::abs(y));
    return std::abs(x - y) <= rel * m;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Index of the ladder entry nearest to `node` in log space; ties go to the smaller node.
std::size_t ladder_index(const std::vector<double>& ladder, double node) {
    std::size_t best = 0;
    double best_d = 0.0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double d = std::abs(std::log(ladder[i]) - std::log(node));
        if (i == 0 || d < best_d - 1e-12) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

struct PairClaims {
    bool die = false;    // first over second by die area
    bool node = false;   // first at least one node step finer than second
    bool diode = false;  // first over second by package area
};

PairClaims claims(const Part& x, const Part& y, const EdgeParams& p) {
    PairClaims c;
    const auto& ax = x.attributes;
    const auto& ay = y.attributes;
    if (x.category.is_ic() && y.category.is_ic()) {
        if (ax.die_area && ay.die_area && *ay.die_area > 0.0) {
            c.die = *ax.die_area >= (1.0 + p.epsilon) * *ay.die_area;
        }
        if (ax.process_node && ay.process_node && !p.node_ladder.empty()) {
            c.node = ladder_index(p.node_ladder, *ax.process_node) < ladder_index(p.node_ladder, *ay.process_node);
        }
    }
    if (x.category.is_diode() && y.category.is_diode() && y.package_area > 0.0) {
        c.diode = x.package_area >= (1.0 + p.epsilon) * y.package_area;
    }
    return c;
}

std::string edge_id(EdgeKind k, Dominance d, const std::string& a, const std::string& b) {
    return std::string(to_string(k)) + (d == Dominance::AGeB ? "|A>=B|" : "|B>=A|") + a + "|" + b;
}

void remove_ids(std::vector<PartInstance>& v, std::span<const std::string> ids, const char* side) {
    for (const auto& id : ids) {
        auto it = std::find_if(v.begin(), v.end(), [&](const PartInstance& p) { return p.instance_id == id; });
        if (it == v.end()) throw Error(std::string("instance ") + id + " not available on side " + side);
        v.erase(it);
    }
}

}  // namespace

std::string_view to_string(EdgeKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "user_rule";
}

EdgeKind edge_kind_from_string(std::string_view s) {
    for (const auto& [kind, name] : kKindNames) {
        if (name == s) return kind;
    }
    throw ParseError("unknown edge kind '" + std::string(s) + "'", 0);
}

std::int64_t CancellationReport::total_quantity() const {
    std::int64_t n = 0;
    for (const auto& p : pairs) n += p.quantity;
    return n;
}

std::string name_stem(std::string_view name) {
    const auto pos = name.rfind('-');
    return upper(pos == std::string_view::npos || pos == 0 ? name : name.substr(0, pos));
}

bool same_passive_package(const Part& a, const Part& b) {
    return a.category.is_passive() && a.category == b.category && !a.package_type.empty() &&
           upper(a.package_type) == upper(b.package_type);
}

bool same_core_chip(const Part& a, const Part& b) {
    if (!a.category.is_ic() || !b.category.is_ic()) return false;
    const auto& ca = a.attributes.core_architecture;
    const auto& cb = b.attributes.core_architecture;
    if (!ca || !cb || ca->empty() || upper(*ca) != upper(*cb)) return false;
    const std::string sa = name_stem(a.name);
    return !sa.empty() && sa == name_stem(b.name);
}

bool equivalent_process(const Part& a, const Part& b) {
    if (!(a.category == b.category) || upper(a.package_type) != upper(b.package_type)) return false;
    if (!within(a.package_area, b.package_area, 0.02)) return false;
    const auto& ma = a.attributes.mass;
    const auto& mb = b.attributes.mass;
    if (ma && mb) return within(*ma, *mb, 0.02);
    // Without masses, only an identical part name is accepted as equivalent.
    return !a.name.empty() && upper(a.name) == upper(b.name);
}

ReducedDesigns cancel_identical(const DesignInventory& a, const DesignInventory& b) {
    // Remaining quantity per part; cancellation always removes the lowest ordinals.
    std::map<std::string, std::int64_t> cancelled_a, cancelled_b;
    auto remaining = [](const Part& p, std::map<std::string, std::int64_t>& used) {
        return p.quantity - used[p.part_id];
    };

    ReducedDesigns out;
    using Pred = bool (*)(const Part&, const Part&);
    const Pred preds[] = {same_passive_package, same_core_chip, equivalent_process};
    for (int kind = 1; kind <= 3; ++kind) {
        // Parts are kept sorted by id, so iteration order is canonical on both sides.
        std::vector<const Part*> pa, pb;
        for (const auto& p : a.parts) pa.push_back(&p);
        for (const auto& p : b.parts) pb.push_back(&p);
        auto by_id = [](const Part* x, const Part* y) { return x->part_id < y->part_id; };
        std::sort(pa.begin(), pa.end(), by_id);
        std::sort(pb.begin(), pb.end(), by_id);
        for (const Part* x : pa) {
            for (const Part* y : pb) {
                const std::int64_t ra = remaining(*x, cancelled_a);
                if (ra <= 0) break;
                const std::int64_t rb = remaining(*y, cancelled_b);
                if (rb <= 0 || !preds[kind - 1](*x, *y)) continue;
                const std::int64_t n = std::min(ra, rb);
                cancelled_a[x->part_id] += n;
                cancelled_b[y->part_id] += n;
                out.report.pairs.push_back({x->part_id, y->part_id, n, kind});
            }
        }
    }

    for (auto& inst : expand_instances(a, Side::A)) {
        if (inst.ordinal >= cancelled_a[inst.part_id]) out.a.push_back(std::move(inst));
    }
    for (auto& inst : expand_instances(b, Side::B)) {
        if (inst.ordinal >= cancelled_b[inst.part_id]) out.b.push_back(std::move(inst));
    }
    return out;
}

void cancel_equivalent(ReducedDesigns& reduced, std::span<const std::string> a_ids,
                       std::span<const std::string> b_ids) {
    remove_ids(reduced.a, a_ids, "A");
    remove_ids(reduced.b, b_ids, "B");
    CancelledPair c;
    c.a_part_id = a_ids.empty() ? "" : a_ids.front();
    c.b_part_id = b_ids.empty() ? "" : b_ids.front();
    c.quantity = static_cast<std::int64_t>(std::max(a_ids.size(), b_ids.size()));
    c.equivalence = 0;
    reduced.report.pairs.push_back(std::move(c));
}

std::vector<HeuristicEdge> generate_edges(std::span<const PartInstance> a, std::span<const PartInstance> b,
                                          const DesignInventory& inv_a, const DesignInventory& inv_b,
                                          const EdgeParams& params) {
    std::vector<HeuristicEdge> edges;
    // Claims depend only on the part pair; cache them.
    std::map<std::pair<std::string, std::string>, std::pair<PairClaims, PairClaims>> cache;

    for (const auto& ia : a) {
        const Part* pa = inv_a.find(ia.part_id);
        if (!pa) continue;
        for (const auto& ib : b) {
            const Part* pb = inv_b.find(ib.part_id);
            if (!pb) continue;
            auto key = std::make_pair(pa->part_id, pb->part_id);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, std::make_pair(claims(*pa, *pb, params), claims(*pb, *pa, params))).first;
            const PairClaims& ab = it->second.first;
            const PairClaims& ba = it->second.second;

            auto emit = [&](EdgeKind k, Dominance d, std::string why) {
                edges.push_back({edge_id(k, d, ia.instance_id, ib.instance_id), k, d, {ia.instance_id},
                                 {ib.instance_id}, std::move(why)});
            };
            const auto& xa = pa->attributes;
            const auto& xb = pb->attributes;
            // A die-size claim is withheld if the other part is on a finer node, and vice versa.
            if (ab.die && !ba.node) {
                emit(EdgeKind::DieSize, Dominance::AGeB,
                     pa->name + " die " + fmt(*xa.die_area) + " mm2 >= 1.1 x " + pb->name + " die " + fmt(*xb.die_area) + " mm2");
            }
            if (ba.die && !ab.node) {
                emit(EdgeKind::DieSize, Dominance::BGeA,
                     pb->name + " die " + fmt(*xb.die_area) + " mm2 >= 1.1 x " + pa->name + " die " + fmt(*xa.die_area) + " mm2");
            }
            if (ab.node && !ba.die) {
                emit(EdgeKind::ProcessNode, Dominance::AGeB,
                     pa->name + " at " + fmt(*xa.process_node) + " nm is finer than " + pb->name + " at " +
                         fmt(*xb.process_node) + " nm");
            }
            if (ba.node && !ab.die) {
                emit(EdgeKind::ProcessNode, Dominance::BGeA,
                     pb->name + " at " + fmt(*xb.process_node) + " nm is finer than " + pa->name + " at " +
                         fmt(*xa.process_node) + " nm");
            }
            if (ab.diode) {
                emit(EdgeKind::DiodeSize, Dominance::AGeB,
                     pa->name + " package " + fmt(pa->package_area) + " mm2 >= 1.1 x " + fmt(pb->package_area) + " mm2");
            }
            if (ba.diode) {
                emit(EdgeKind::DiodeSize, Dominance::BGeA,
                     pb->name + " package " + fmt(pb->package_area) + " mm2 >= 1.1 x " + fmt(pa->package_area) + " mm2");
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) { return x.edge_id < y.edge_id; });
    return edges;
}

PruneResult prune_conflicts(std::vector<HeuristicEdge> edges) {
    std::map<std::pair<std::string, std::string>, std::set<Dominance>> dirs;
    for (const auto& e : edges) {
        if (e.a_instances.size() == 1 && e.b_instances.size() == 1) {
            dirs[{e.a_instances[0], e.b_instances[0]}].insert(e.direction);
        }
    }
    PruneResult out;
    std::map<std::pair<std::string, std::string>, Conflict> conflicts;
    for (auto& e : edges) {
        if (e.a_instances.size() == 1 && e.b_instances.size() == 1) {
            auto key = std::make_pair(e.a_instances[0], e.b_instances[0]);
            if (dirs[key].size() > 1) {
                auto& c = conflicts[key];
                c.a_instance = key.first;
                c.b_instance = key.second;
                c.rationales.push_back(std::string(to_string(e.kind)) + ": " + e.rationale);
                continue;
            }
        }
        out.kept.push_back(std::move(e));
    }
    for (auto& [k, c] : conflicts) out.conflicts.push_back(std::move(c));
    return out;
}

void to_json(json& j, const HeuristicEdge& e) {
    j = json{{"id", e.edge_id},
             {"kind", to_string(e.kind)},
             {"direction", e.direction == Dominance::AGeB ? "A>=B" : "B>=A"},
             {"a", e.a_instances},
             {"b", e.b_instances},
             {"rationale", e.rationale}};
}

void from_json(const json& j, HeuristicEdge& e) {
    e.edge_id = j.at("id").get<std::string>();
    e.kind = edge_kind_from_string(j.at("kind").get<std::string>());
    e.direction = j.value("direction", std::string("A>=B")) == "B>=A" ? Dominance::BGeA : Dominance::AGeB;
    e.a_instances = j.at("a").get<std::vector<std::string>>();
    e.b_instances = j.at("b").get<std::vector<std::string>>();
    e.rationale = j.value("rationale", std::string());
}

void to_json(json& j, const CancelledPair& c) {
    j = json{{"a_part", c.a_part_id}, {"b_part", c.b_part_id}, {"quantity", c.quantity}, {"equivalence", c.equivalence}};
}

void to_json(json& j, const Conflict& c) {
    j = json{{"a", c.a_instance}, {"b", c.b_instance}, {"rationales", c.rationales}};
}

json edge_dump(std::span<const HeuristicEdge> edges, std::span<const Conflict> conflicts,
               const CancellationReport& cancelled) {
    json e = json::array(), c = json::array(), x = json::array();
    for (const auto& v : edges) e.push_back(v);
    for (const auto& v : conflicts) c.push_back(v);
    for (const auto& v : cancelled.pairs) x.push_back(v);
    return json{{"edges", e}, {"conflicts", c}, {"cancelled", x}};
}

}  // namespace delta_lca
