// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "delta_lca/error.hpp"

namespace delta_lca {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

fs::path Config::default_path() { return fs::path(DELTA_LCA_DATA_DIR) / "config.json"; }

Config Config::from_json(const json& j, const fs::path& base) {
    Config c;
    try {
        c.factors = resolve(base, j.at("factors").get<std::string>());
        c.die_coefficients = resolve(base, j.at("die_coefficients").get<std::string>());
        c.process_nodes = resolve(base, j.at("process_nodes").get<std::string>());
        c.package_aliases = resolve(base, j.at("package_aliases").get<std::string>());
        if (auto it = j.find("catalog"); it != j.end()) {
            c.catalog_provider = it->value("provider", c.catalog_provider);
            c.catalog_fixture_dir = resolve(base, it->value("fixture_dir", std::string("catalog")));
            c.catalog_http.base_url = it->value("base_url", std::string());
            c.catalog_http.credentials_env = it->value("credentials_env", std::string());
            c.catalog_http.timeout_ms = it->value("timeout_ms", 5000);
            c.catalog_http.retry_budget = it->value("retry_budget", 2);
            c.catalog_parallelism = std::max(1, it->value("parallelism", 4));
        }
        if (auto it = j.find("service"); it != j.end()) {
            c.bind = it->value("bind", c.bind);
            c.port = it->value("port", c.port);
            c.data_dir = resolve(base, it->value("data_dir", std::string("sessions")));
            c.time_budget_ms = it->value("time_budget_ms", c.time_budget_ms);
        }
        c.epsilon = j.value("epsilon", c.epsilon);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    if (c.catalog_http.timeout_ms <= 0) throw ConfigError("catalog timeout_ms must be > 0");
    if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (c.catalog_provider != "fixture" && c.catalog_provider != "http" && c.catalog_provider != "none") {
        throw ConfigError("unknown catalog provider '" + c.catalog_provider + "'");
    }
    return c;
}

Config Config::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bad config " + path.string() + ": " + e.what());
    }
    return from_json(j, fs::absolute(path).parent_path());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Engine::Engine(Config config, bool offline) : config_(std::move(config)) {
    factors_ = FactorTables::load(config_.factors.string());
    dies_ = DieCoefficientTable::load(config_.die_coefficients.string());
    nodes_ = ProcessNodeDataset::load(config_.process_nodes.string());
    normalizer_ = PackageNormalizer::load(config_.package_aliases.string());
    if (offline || config_.catalog_provider == "fixture") {
        catalog_ = std::make_unique<FixtureCatalog>(config_.catalog_fixture_dir);
    } else if (config_.catalog_provider == "http") {
        catalog_ = std::make_unique<HttpCatalog>(config_.catalog_http);
    }
}

ParseOptions Engine::parse_options() const {
    ParseOptions o;
    o.normalizer = normalizer_;
    return o;
}

EdgeParams Engine::edge_params() const { return {config_.epsilon, factors_.node_ladder()}; }

DesignInventory Engine::parse(std::string_view bytes, DesignFormat format, const std::string& source_name,
                              std::vector<std::string>* warnings) const {
    return parse_design(bytes, format, parse_options(), source_name, warnings);
}

DesignInventory Engine::enrich(DesignInventory inv, std::vector<std::string>* warnings) const {
    std::vector<std::size_t> ics;
    for (std::size_t i = 0; i < inv.parts.size(); ++i) {
        if (inv.parts[i].category.is_ic()) ics.push_back(i);
    }

    std::vector<std::optional<MappedAttributes>> mapped(inv.parts.size());
    std::vector<std::string> lookup_warnings;
    if (catalog_ && !ics.empty()) {
        std::mutex mu;
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t k; (k = next.fetch_add(1)) < ics.size();) {
                const Part& part = inv.parts[ics[k]];
                try {
                    if (auto rec = lookup(part.name, *catalog_)) {
                        mapped[ics[k]] = map_attributes(*rec, normalizer_);
                    }
                } catch (const CatalogUnavailable& e) {
                    std::lock_guard lock(mu);
                    lookup_warnings.push_back(part.part_id + ": catalog unavailable, enrichment unknown (" + e.what() + ")");
                }
            }
        };
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(config_.catalog_parallelism), ics.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }
    std::sort(lookup_warnings.begin(), lookup_warnings.end());

    auto fill = [](auto& dst, const auto& src) {
        if (!dst && src) dst = src;
    };
    for (std::size_t i : ics) {
        Part& p = inv.parts[i];
        std::optional<std::pair<double, double>> catalog_dims;
        if (mapped[i]) {
            const auto& m = *mapped[i];
            auto& a = p.attributes;
            fill(a.max_frequency, m.attributes.max_frequency);
            fill(a.active_current_per_mhz, m.attributes.active_current_per_mhz);
            fill(a.pin_count, m.attributes.pin_count);
            fill(a.core_architecture, m.attributes.core_architecture);
            fill(a.memory_size, m.attributes.memory_size);
            fill(a.mass, m.attributes.mass);
            fill(a.die_area, m.attributes.die_area);
            fill(a.process_node, m.attributes.process_node);
            if (!a.pin_count && m.pin_hint) a.pin_count = m.pin_hint;
            // File-derived area wins; the catalog's package family wins.
            if (m.package_type && !m.package_type->empty()) p.package_type = *m.package_type;
            catalog_dims = m.package_dims;
            for (const auto& w : m.warnings) lookup_warnings.push_back(p.part_id + ": " + w);
        }
        auto& a = p.attributes;
        if (!a.die_area && !p.package_type.empty()) {
            PackageDims dims;
            bool have = false;
            if (p.package_area > 0.0) {
                dims.width = std::sqrt(p.package_area);
                have = true;
            } else if (catalog_dims) {
                dims.width = catalog_dims->first;
                dims.height = catalog_dims->second;
                have = true;
            }
            if (have) {
                try {
                    const double die = infer_die_area(p.package_type, dims, dies_).die_area;
                    // sqrt(area)^2 can land one ulp above the package area.
                    a.die_area = p.package_area > 0.0 ? std::min(die, p.package_area) : die;
                } catch (const UnknownPackage& e) {
                    lookup_warnings.push_back(p.part_id + ": " + e.what());
                }
            }
        }
        if (!a.process_node && a.max_frequency && a.active_current_per_mhz && *a.max_frequency > 0.0 &&
            *a.active_current_per_mhz > 0.0) {
            a.process_node = infer_process_node(*a.max_frequency, *a.active_current_per_mhz, nodes_).node_nm;
        }
    }
    if (warnings) warnings->insert(warnings->end(), lookup_warnings.begin(), lookup_warnings.end());
    return inv;
}

DesignInventory Engine::prepare(DesignInventory inv, std::vector<std::string>* warnings) const {
    return estimate_inventory(enrich(std::move(inv), warnings), factors_, warnings);
}

std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::AGreaterOrEqual: return "a_ge_b";
        case Comparator::BGreaterOrEqual: return "b_ge_a";
        case Comparator::Equivalent: return "equivalent";
    }
    return "a_ge_b";
}

Comparator comparator_from_string(std::string_view s) {
    if (s == "a_ge_b" || s == "AGreaterOrEqual" || s == ">=") return Comparator::AGreaterOrEqual;
    if (s == "b_ge_a" || s == "BGreaterOrEqual" || s == "<=") return Comparator::BGreaterOrEqual;
    if (s == "equivalent" || s == "Equivalent" || s == "==") return Comparator::Equivalent;
    throw ValidationError("unknown comparator '" + std::string(s) + "'");
}

void to_json(json& j, const UserRule& r) {
    auto sel = [](const std::vector<RuleSelection>& v) {
        json arr = json::array();
        for (const auto& s : v) arr.push_back({{"part_id", s.part_id}, {"quantity", s.quantity}});
        return arr;
    };
    j = json{{"rule_id", r.rule_id},
             {"a", sel(r.a_selection)},
             {"b", sel(r.b_selection)},
             {"comparator", to_string(r.comparator)},
             {"note", r.note}};
}

void from_json(const json& j, UserRule& r) {
    auto sel = [](const json& arr) {
        std::vector<RuleSelection> out;
        for (const auto& s : arr) out.push_back({s.at("part_id").get<std::string>(), s.value("quantity", std::int64_t{1})});
        return out;
    };
    try {
        r.rule_id = j.value("rule_id", std::string());
        r.a_selection = sel(j.at("a"));
        r.b_selection = sel(j.at("b"));
        r.comparator = comparator_from_string(j.value("comparator", std::string("a_ge_b")));
        r.note = j.value("note", std::string());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed rule: ") + e.what());
    }
}

std::vector<UserRule> rules_from_json(const json& j) {
    const json& arr = j.is_object() ? j.at("rules") : j;
    std::vector<UserRule> out;
    for (const auto& r : arr) out.push_back(r.get<UserRule>());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].rule_id.empty()) out[i].rule_id = "r" + std::to_string(i + 1);
    }
    return out;
}

void validate_rule(const UserRule& rule, const DesignInventory& a, const DesignInventory& b) {
    if (rule.a_selection.empty() || rule.b_selection.empty()) {
        throw ValidationError("rule " + rule.rule_id + ": both selections must be nonempty");
    }
    auto check = [&](const std::vector<RuleSelection>& sel, const DesignInventory& inv, char side) {
        std::map<std::string, std::int64_t> total;
        for (const auto& s : sel) {
            const Part* p = inv.find(s.part_id);
            if (!p) throw ValidationError("rule " + rule.rule_id + ": unknown part " + s.part_id + " on side " + side);
            if (s.quantity < 1) throw ValidationError("rule " + rule.rule_id + ": quantity must be >= 1");
            total[s.part_id] += s.quantity;
            if (total[s.part_id] > p->quantity) {
                throw ValidationError("rule " + rule.rule_id + ": quantity of " + s.part_id + " exceeds " +
                                      std::to_string(p->quantity));
            }
        }
    };
    check(rule.a_selection, a, 'A');
    check(rule.b_selection, b, 'B');
}

DirectionRequest direction_from_string(std::string_view s) {
    if (s == "a-ge-b") return DirectionRequest::AGeB;
    if (s == "b-ge-a") return DirectionRequest::BGeA;
    if (s == "auto") return DirectionRequest::Auto;
    throw ValidationError("direction must be a-ge-b, b-ge-a or auto");
}

namespace {

// First `quantity` remaining instances of each selected part, in ordinal order.
std::vector<std::string> select_instances(const std::vector<RuleSelection>& sel, const std::vector<PartInstance>& pool,
                                          const std::string& rule_id) {
    std::vector<std::string> out;
    for (const auto& s : sel) {
        std::int64_t need = s.quantity;
        for (const auto& inst : pool) {
            if (need == 0) break;
            if (inst.part_id != s.part_id) continue;
            if (std::find(out.begin(), out.end(), inst.instance_id) != out.end()) continue;
            out.push_back(inst.instance_id);
            --need;
        }
        if (need > 0) {
            throw ValidationError("rule " + rule_id + ": only " + std::to_string(s.quantity - need) + " of " +
                                  std::to_string(s.quantity) + " units of " + s.part_id +
                                  " remain after cancellation");
        }
    }
    return out;
}

ComparisonOutcome solve_direction(const DesignInventory& a, const DesignInventory& b, const ReducedDesigns& reduced,
                                  const std::vector<HeuristicEdge>& edges, const std::vector<Conflict>& conflicts,
                                  Dominance d, std::int64_t budget) {
    ComparisonOutcome out;
    out.reduced = reduced;
    out.edges = edges;
    out.conflicts = conflicts;
    out.problem = build_problem(reduced, a, b, edges, d);
    SolveOptions opts;
    opts.time_budget_ms = budget;
    out.result = solve(out.problem, opts);
    return out;
}

}  // namespace

ComparisonOutcome compare_designs(const DesignInventory& a, const DesignInventory& b, std::span<const UserRule> rules,
                                  DirectionRequest direction, const EdgeParams& params, std::int64_t time_budget_ms) {
    for (const auto& r : rules) validate_rule(r, a, b);

    ReducedDesigns reduced = cancel_identical(a, b);
    for (const auto& r : rules) {
        if (r.comparator != Comparator::Equivalent) continue;
        auto ia = select_instances(r.a_selection, reduced.a, r.rule_id);
        auto ib = select_instances(r.b_selection, reduced.b, r.rule_id);
        cancel_equivalent(reduced, ia, ib);
        reduced.report.pairs.back().a_part_id = r.a_selection.front().part_id;
        reduced.report.pairs.back().b_part_id = r.b_selection.front().part_id;
    }

    auto generated = generate_edges(reduced.a, reduced.b, a, b, params);
    PruneResult pruned = prune_conflicts(std::move(generated));
    // User rules are added after pruning so a rule never removes an automatic edge.
    std::vector<HeuristicEdge> edges = std::move(pruned.kept);
    for (const auto& r : rules) {
        if (r.comparator == Comparator::Equivalent) continue;
        HeuristicEdge e;
        e.kind = EdgeKind::UserRule;
        e.direction = r.comparator == Comparator::AGreaterOrEqual ? Dominance::AGeB : Dominance::BGeA;
        e.edge_id = std::string("user_rule|") + (e.direction == Dominance::AGeB ? "A>=B|" : "B>=A|") + r.rule_id;
        e.a_instances = select_instances(r.a_selection, reduced.a, r.rule_id);
        e.b_instances = select_instances(r.b_selection, reduced.b, r.rule_id);
        e.rationale = r.note.empty() ? "user rule " + r.rule_id : r.note;
        edges.push_back(std::move(e));
    }

    if (direction == DirectionRequest::BGeA) {
        return solve_direction(a, b, reduced, edges, pruned.conflicts, Dominance::BGeA, time_budget_ms);
    }
    ComparisonOutcome first = solve_direction(a, b, reduced, edges, pruned.conflicts, Dominance::AGeB, time_budget_ms);
    if (direction == DirectionRequest::AGeB || first.result.verdict == Verdict::Proven) return first;
    ComparisonOutcome second = solve_direction(a, b, reduced, edges, pruned.conflicts, Dominance::BGeA, time_budget_ms);
    return second.result.verdict == Verdict::Proven ? second : first;
}

json comparison_report(const ComparisonOutcome& o, const DesignInventory& a, const DesignInventory& b,
                       std::span<const UserRule> rules) {
    const bool swapped = o.problem.direction == Dominance::BGeA;
    std::set<std::string> matched;
    for (const auto* v : {&o.result.a_delta, &o.result.b_delta}) matched.insert(v->begin(), v->end());

    auto table = [&](const DesignInventory& inv, Side side, const std::vector<PartInstance>& remaining) {
        std::set<std::string> open;
        for (const auto& inst : remaining) open.insert(inst.instance_id);
        json unmatched = json::array(), done = json::array();
        for (const auto& inst : expand_instances(inv, side)) {
            const Part* p = inv.find(inst.part_id);
            std::string status = !open.count(inst.instance_id) ? "cancelled"
                                 : matched.count(inst.instance_id) ? "matched"
                                                                   : "unmatched";
            json row{{"instance", inst.instance_id}, {"part_id", inst.part_id}, {"name", p->name},
                     {"category", to_string(p->category)}, {"status", status},
                     {"footprint_g", p->footprint_estimate ? json(*p->footprint_estimate) : json(nullptr)}};
            (status == "unmatched" ? unmatched : done).push_back(std::move(row));
        }
        for (auto& r : done) unmatched.push_back(std::move(r));
        return unmatched;
    };

    json rule_arr = json::array();
    for (const auto& r : rules) rule_arr.push_back(r);
    return json{{"result", result_json(o.problem, o.result)},
                {"proving", swapped ? "B>=A" : "A>=B"},
                {"cancellation", edge_dump({}, {}, o.reduced.report)["cancelled"]},
                {"edges", edge_dump(o.edges, o.conflicts, {})},
                {"totals", {{"A", total_footprint(a)}, {"B", total_footprint(b)}}},
                {"tables", {{"A", table(a, Side::A, o.reduced.a)}, {"B", table(b, Side::B, o.reduced.b)}}},
                {"rules", rule_arr},
                {"solver", {{"nodes_explored", o.result.nodes_explored}, {"optimal", o.result.optimal},
                            {"variables", o.problem.variable_count()}, {"constraints", o.problem.constraint_count()}}}};
}

}  // namespace delta_lca
