// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "delta_lca/error.hpp"
#include "delta_lca/heuristics.hpp"

using namespace delta_lca;

namespace {

const std::vector<double> kLadder = {14, 16, 22, 28, 40, 55, 65, 90, 130, 180, 350};

EdgeParams params() { return EdgeParams{0.10, kLadder}; }

Part passive(std::string id, SubKind k, std::string size, std::int64_t qty) {
    Part p;
    p.part_id = id;
    p.name = id;
    p.designator_prefix = "R";
    p.category = PartCategory::passive(k);
    p.package_type = size;
    p.package_area = 0.5;
    p.quantity = qty;
    return p;
}

Part ic(std::string id, std::string name, std::optional<double> die, std::optional<double> node,
        std::string pkg = "QFN", double area = 49.0) {
    Part p;
    p.part_id = id;
    p.name = name;
    p.designator_prefix = "U";
    p.category = PartCategory::ic();
    p.package_type = pkg;
    p.package_area = area;
    p.attributes.die_area = die;
    p.attributes.process_node = node;
    return p;
}

Part diode(std::string id, double area) {
    Part p;
    p.part_id = id;
    p.name = id;
    p.designator_prefix = "D";
    p.category = PartCategory::active(SubKind::Diode);
    p.package_type = "SOD";
    p.package_area = area;
    return p;
}

DesignInventory design(std::string id, std::vector<Part> parts) {
    DesignInventory inv;
    inv.design_id = std::move(id);
    inv.board = {1000.0, 2, 1.0, "FR-4"};
    inv.parts = std::move(parts);
    return inv;
}

std::vector<HeuristicEdge> edges_between(const DesignInventory& a, const DesignInventory& b) {
    const auto ia = expand_instances(a, Side::A);
    const auto ib = expand_instances(b, Side::B);
    return generate_edges(ia, ib, a, b, params());
}

HeuristicEdge unit(EdgeKind k, Dominance d, std::string a, std::string b) {
    return {std::string(to_string(k)) + "|" + a + "|" + b + (d == Dominance::AGeB ? "|ab" : "|ba"), k, d, {a}, {b},
            "test"};
}

}  // namespace

TEST(Cancel, MinRuleForPassives) {
    const auto a = design("a", {passive("R", SubKind::Resistor, "0402", 10)});
    const auto b = design("b", {passive("R", SubKind::Resistor, "0402", 7)});
    const auto r = cancel_identical(a, b);
    EXPECT_EQ(r.a.size(), 3u);
    EXPECT_TRUE(r.b.empty());
    ASSERT_EQ(r.report.pairs.size(), 1u);
    EXPECT_EQ(r.report.pairs[0].quantity, 7);
    EXPECT_EQ(r.report.pairs[0].equivalence, 1);
    // Lowest ordinals go first.
    EXPECT_EQ(r.a.front().ordinal, 7);
}

TEST(Cancel, DifferentSizeOrKindStays) {
    const auto a = design("a", {passive("R", SubKind::Resistor, "0402", 2)});
    const auto b = design("b", {passive("R", SubKind::Resistor, "0603", 2), passive("C", SubKind::Capacitor, "0402", 2)});
    const auto r = cancel_identical(a, b);
    EXPECT_EQ(r.a.size(), 2u);
    EXPECT_EQ(r.b.size(), 4u);
    EXPECT_TRUE(r.report.pairs.empty());
}

TEST(Cancel, SameCoreDifferentPackage) {
    auto x = ic("U1", "ATMEGA32U4-AU", std::nullopt, std::nullopt, "QFP", 100.0);
    auto y = ic("U1", "ATMEGA32U4-MU", std::nullopt, std::nullopt, "QFN", 49.0);
    x.attributes.core_architecture = "AVR";
    y.attributes.core_architecture = "avr";
    EXPECT_TRUE(same_core_chip(x, y));
    const auto r = cancel_identical(design("a", {x}), design("b", {y}));
    EXPECT_TRUE(r.a.empty());
    EXPECT_TRUE(r.b.empty());
    ASSERT_EQ(r.report.pairs.size(), 1u);
    EXPECT_EQ(r.report.pairs[0].equivalence, 2);

    y.name = "ATMEGA16U4-MU";
    EXPECT_FALSE(same_core_chip(x, y));
    y.name = "ATMEGA32U4-MU";
    y.attributes.core_architecture.reset();
    EXPECT_FALSE(same_core_chip(x, y));
}

TEST(Cancel, NameStem) {
    EXPECT_EQ(name_stem("ATmega32U4-AU"), "ATMEGA32U4");
    EXPECT_EQ(name_stem("LM358"), "LM358");
    EXPECT_EQ(name_stem("-X"), "-X");
}

TEST(Cancel, EquivalentProcess) {
    Part x;
    x.part_id = "M";
    x.name = "BUZZER-A";
    x.category = PartCategory::misc();
    x.package_type = "SMD";
    x.package_area = 100.0;
    x.attributes.mass = 2.0;
    Part y = x;
    y.name = "BUZZER-B";
    y.package_area = 101.5;
    y.attributes.mass = 2.03;
    EXPECT_TRUE(equivalent_process(x, y));
    y.attributes.mass = 2.2;
    EXPECT_FALSE(equivalent_process(x, y));
    y.attributes.mass.reset();
    EXPECT_FALSE(equivalent_process(x, y)) << "unknown mass needs identical names";
    y.name = "buzzer-a";
    EXPECT_TRUE(equivalent_process(x, y));
    y.package_area = 110.0;
    EXPECT_FALSE(equivalent_process(x, y));
    const auto r = cancel_identical(design("a", {x}), design("b", {x}));
    ASSERT_EQ(r.report.pairs.size(), 1u);
    EXPECT_EQ(r.report.pairs[0].equivalence, 3);
}

TEST(Cancel, SelfComparisonEmptiesBothSides) {
    auto u = ic("U", "STM32F103-T6", 9.0, 180.0);
    u.attributes.core_architecture = "ARM";
    const auto d = design("d", {passive("R", SubKind::Resistor, "0402", 12), passive("C", SubKind::Capacitor, "0805", 3), u,
                                diode("D", 4.0)});
    const auto r = cancel_identical(d, d);
    EXPECT_TRUE(r.a.empty());
    EXPECT_TRUE(r.b.empty());
    EXPECT_EQ(r.report.total_quantity(), 17);
}

TEST(Cancel, SymmetricQuantities) {
    std::mt19937_64 rng(6);
    const std::vector<std::string> sizes = {"0201", "0402", "0603"};
    for (int t = 0; t < 30; ++t) {
        std::vector<Part> pa, pb;
        for (int i = 0; i < 3; ++i) {
            pa.push_back(passive("a" + std::to_string(i), SubKind::Capacitor, sizes[rng() % 3], 1 + rng() % 6));
            pb.push_back(passive("b" + std::to_string(i), SubKind::Capacitor, sizes[rng() % 3], 1 + rng() % 6));
        }
        const auto a = design("a", pa), b = design("b", pb);
        const auto ab = cancel_identical(a, b), ba = cancel_identical(b, a);
        EXPECT_EQ(ab.report.total_quantity(), ba.report.total_quantity());
        EXPECT_EQ(ab.a.size(), ba.b.size());
        for (const auto& pair : ab.report.pairs) {
            EXPECT_LE(pair.quantity, std::min(a.find(pair.a_part_id)->quantity, b.find(pair.b_part_id)->quantity));
        }
    }
}

TEST(Cancel, UserEquivalence) {
    const auto a = design("a", {passive("R", SubKind::Resistor, "0402", 2)});
    const auto b = design("b", {passive("C", SubKind::Capacitor, "0402", 1)});
    auto r = cancel_identical(a, b);
    const std::vector<std::string> ia = {r.a[0].instance_id}, ib = {r.b[0].instance_id};
    cancel_equivalent(r, ia, ib);
    EXPECT_EQ(r.a.size(), 1u);
    EXPECT_TRUE(r.b.empty());
    EXPECT_EQ(r.report.pairs.back().equivalence, 0);
    EXPECT_THROW(cancel_equivalent(r, ia, {}), Error);
}

TEST(Edges, DieSizeSameNode) {
    const auto e = edges_between(design("a", {ic("U", "BIG", 20.0, 90.0)}), design("b", {ic("V", "SMALL", 10.0, 90.0)}));
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].kind, EdgeKind::DieSize);
    EXPECT_EQ(e[0].direction, Dominance::AGeB);
    EXPECT_EQ(e[0].a_instances, std::vector<std::string>{"A:a/U#0"});
    EXPECT_EQ(e[0].edge_id, "die_size|A>=B|A:a/U#0|B:b/V#0");
}

TEST(Edges, MarginRespected) {
    EXPECT_TRUE(edges_between(design("a", {ic("U", "X", 10.9, 90.0)}), design("b", {ic("V", "Y", 10.0, 90.0)})).empty());
    EXPECT_EQ(edges_between(design("a", {ic("U", "X", 11.0, 90.0)}), design("b", {ic("V", "Y", 10.0, 90.0)})).size(), 1u);
}

TEST(Edges, ProcessNodeSimilarDie) {
    const auto e = edges_between(design("a", {ic("U", "FINE", 10.0, 28.0)}), design("b", {ic("V", "COARSE", 10.5, 90.0)}));
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].kind, EdgeKind::ProcessNode);
    EXPECT_EQ(e[0].direction, Dominance::AGeB);
}

TEST(Edges, NodeJitterIsNotAStep) {
    // 85 nm and 90 nm land on the same ladder entry.
    EXPECT_TRUE(edges_between(design("a", {ic("U", "X", 10.0, 85.0)}), design("b", {ic("V", "Y", 10.0, 90.0)})).empty());
}

TEST(Edges, ConflictingEvidenceGivesNoEdge) {
    // Larger die on A, finer node on B.
    EXPECT_TRUE(edges_between(design("a", {ic("U", "X", 20.0, 180.0)}), design("b", {ic("V", "Y", 10.0, 40.0)})).empty());
}

TEST(Edges, MissingAttributes) {
    EXPECT_TRUE(edges_between(design("a", {ic("U", "X", std::nullopt, 90.0)}), design("b", {ic("V", "Y", 10.0, 90.0)})).empty());
    // Unknown nodes do not block a die claim.
    EXPECT_EQ(edges_between(design("a", {ic("U", "X", 20.0, std::nullopt)}), design("b", {ic("V", "Y", 10.0, 90.0)})).size(),
              1u);
}

TEST(Edges, DiodeSize) {
    const auto e = edges_between(design("a", {diode("D1", 2.0)}), design("b", {diode("D2", 4.0)}));
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].kind, EdgeKind::DiodeSize);
    EXPECT_EQ(e[0].direction, Dominance::BGeA);
    EXPECT_TRUE(edges_between(design("a", {diode("D1", 4.0)}), design("b", {passive("R", SubKind::Resistor, "0402", 1)})).empty());
}

TEST(Edges, PerInstanceAndSorted) {
    auto big = ic("U", "BIG", 20.0, 90.0);
    big.quantity = 2;
    auto small = ic("V", "SMALL", 5.0, 90.0);
    small.quantity = 3;
    const auto e = edges_between(design("a", {big}), design("b", {small}));
    EXPECT_EQ(e.size(), 6u);
    EXPECT_TRUE(std::is_sorted(e.begin(), e.end(), [](auto& x, auto& y) { return x.edge_id < y.edge_id; }));
    for (const auto& x : e) {
        EXPECT_EQ(x.a_instances.size(), 1u);
        EXPECT_EQ(x.b_instances.size(), 1u);
    }
}

TEST(Edges, MonotoneWhenNoReverseClaimAppears) {
    // Adding die areas to A parts only strengthens A; no existing edge may vanish.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> die(1.0, 30.0);
    for (int t = 0; t < 40; ++t) {
        std::vector<Part> pa, pb;
        for (int i = 0; i < 3; ++i) {
            pa.push_back(ic("u" + std::to_string(i), "X", (rng() % 2) ? std::optional(die(rng)) : std::nullopt,
                            kLadder[rng() % kLadder.size()]));
            pb.push_back(ic("v" + std::to_string(i), "Y", die(rng), kLadder[rng() % kLadder.size()]));
        }
        const auto before = edges_between(design("a", pa), design("b", pb));
        for (auto& p : pa)
            if (!p.attributes.die_area) p.attributes.die_area = 1000.0;
        for (auto& p : pa) p.package_area = 2000.0;
        const auto after = edges_between(design("a", pa), design("b", pb));
        for (const auto& e : before) {
            if (e.direction == Dominance::BGeA && e.kind == EdgeKind::ProcessNode) continue;  // can now be gated
            EXPECT_NE(std::find(after.begin(), after.end(), e), after.end()) << e.edge_id;
        }
    }
}

TEST(Prune, BidirectionalPairRemoved) {
    std::vector<HeuristicEdge> edges = {unit(EdgeKind::DieSize, Dominance::AGeB, "a1", "b1"),
                                        unit(EdgeKind::ProcessNode, Dominance::BGeA, "a1", "b1"),
                                        unit(EdgeKind::DieSize, Dominance::AGeB, "a1", "b2")};
    const auto r = prune_conflicts(edges);
    ASSERT_EQ(r.kept.size(), 1u);
    EXPECT_EQ(r.kept[0].b_instances, std::vector<std::string>{"b2"});
    ASSERT_EQ(r.conflicts.size(), 1u);
    EXPECT_EQ(r.conflicts[0].a_instance, "a1");
    EXPECT_EQ(r.conflicts[0].b_instance, "b1");
    EXPECT_EQ(r.conflicts[0].rationales.size(), 2u);
}

TEST(Prune, ConsistentEdgesKept) {
    std::vector<HeuristicEdge> edges = {unit(EdgeKind::DieSize, Dominance::AGeB, "a1", "b1"),
                                        unit(EdgeKind::ProcessNode, Dominance::AGeB, "a1", "b1")};
    const auto r = prune_conflicts(edges);
    EXPECT_EQ(r.kept, edges);
    EXPECT_TRUE(r.conflicts.empty());
}

TEST(Prune, NoBidirectionalPairSurvives) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        std::vector<HeuristicEdge> edges;
        for (int k = 0; k < 20; ++k) {
            edges.push_back(unit(EdgeKind::DieSize, (rng() % 2) ? Dominance::AGeB : Dominance::BGeA,
                                 "a" + std::to_string(rng() % 4), "b" + std::to_string(rng() % 4)));
        }
        const auto r = prune_conflicts(edges);
        std::set<std::tuple<std::string, std::string, Dominance>> seen;
        for (const auto& e : r.kept) seen.insert({e.a_instances[0], e.b_instances[0], e.direction});
        for (const auto& [a, b, d] : seen) {
            EXPECT_EQ(seen.count({a, b, d == Dominance::AGeB ? Dominance::BGeA : Dominance::AGeB}), 0u);
        }
    }
}

TEST(Json, EdgeRoundTripAndDump) {
    const auto e = unit(EdgeKind::DiodeSize, Dominance::BGeA, "a1", "b1");
    const nlohmann::json j = e;
    EXPECT_EQ(j.at("kind"), "diode_size");
    EXPECT_EQ(j.at("direction"), "B>=A");
    EXPECT_EQ(j.get<HeuristicEdge>(), e);
    CancellationReport rep;
    rep.pairs.push_back({"R", "R", 3, 1});
    const auto dump = edge_dump(std::vector<HeuristicEdge>{e}, std::vector<Conflict>{}, rep);
    EXPECT_EQ(dump.at("edges").size(), 1u);
    EXPECT_EQ(dump.at("cancelled").at(0).at("quantity"), 3);
    EXPECT_TRUE(dump.at("conflicts").empty());
    for (int k = 1; k <= 7; ++k) {
        const auto kind = static_cast<EdgeKind>(k);
        EXPECT_EQ(edge_kind_from_string(to_string(kind)), kind);
    }
}
