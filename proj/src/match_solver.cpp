// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/match_solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "delta_lca/error.hpp"

namespace delta_lca {

using nlohmann::json;

std::optional<std::size_t> ComparisonProblem::a_index(const std::string& id) const {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].id == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> ComparisonProblem::b_index(const std::string& id) const {
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i].id == id) return i;
    }
    return std::nullopt;
}

void validate_problem(const ComparisonProblem& p) {
    for (const auto* side : {&p.a, &p.b}) {
        for (const auto& n : *side) {
            if (n.weight && !(*n.weight >= 0.0)) throw ValidationError("negative weight on " + n.id);
        }
    }
    for (const auto& e : p.edges) {
        if (e.a.empty() || e.b.empty()) throw ValidationError("edge " + e.edge_id + " has an empty side");
        for (auto i : e.a) {
            if (i >= p.a.size()) throw ValidationError("edge " + e.edge_id + " references a missing a-instance");
        }
        for (auto j : e.b) {
            if (j >= p.b.size()) throw ValidationError("edge " + e.edge_id + " references a missing b-instance");
        }
    }
}

void add_edge(ComparisonProblem& p, const HeuristicEdge& e) {
    if (e.direction != p.direction) throw ValidationError("edge " + e.edge_id + " points the other way");
    const bool swap = p.direction == Dominance::BGeA;
    const auto& big = swap ? e.b_instances : e.a_instances;
    const auto& small = swap ? e.a_instances : e.b_instances;
    if (big.empty() || small.empty()) throw ValidationError("edge " + e.edge_id + " has an empty side");
    ProblemEdge pe{e.edge_id, e.kind, {}, {}, e.rationale};
    for (const auto& id : big) {
        auto i = p.a_index(id);
        if (!i) throw ValidationError("edge " + e.edge_id + " references unknown instance " + id);
        pe.a.push_back(*i);
    }
    for (const auto& id : small) {
        auto j = p.b_index(id);
        if (!j) throw ValidationError("edge " + e.edge_id + " references unknown instance " + id);
        pe.b.push_back(*j);
    }
    p.edges.push_back(std::move(pe));
}

ComparisonProblem build_problem(const ReducedDesigns& reduced, const DesignInventory& inv_a,
                                const DesignInventory& inv_b, std::span<const HeuristicEdge> edges,
                                Dominance direction) {
    auto nodes = [](const std::vector<PartInstance>& insts, const DesignInventory& inv) {
        std::vector<ProblemNode> out;
        for (const auto& inst : insts) {
            const Part* part = inv.find(inst.part_id);
            if (!part) throw ValidationError("instance " + inst.instance_id + " has no part");
            ProblemNode n{inst.instance_id, std::nullopt};
            if (part->footprint_estimate && part->footprint_provenance != Provenance::Unknown) {
                n.weight = *part->footprint_estimate;
            }
            out.push_back(std::move(n));
        }
        return out;
    };
    ComparisonProblem p;
    p.direction = direction;
    if (direction == Dominance::AGeB) {
        p.a = nodes(reduced.a, inv_a);
        p.b = nodes(reduced.b, inv_b);
    } else {
        p.a = nodes(reduced.b, inv_b);
        p.b = nodes(reduced.a, inv_a);
    }
    for (const auto& e : edges) {
        if (e.direction == direction) add_edge(p, e);
    }
    return p;
}

Assignment Assignment::zeros(const ComparisonProblem& p) {
    Assignment x;
    x.b.assign(p.b.size(), 0);
    x.c_a.assign(p.a.size(), 0);
    x.c_b.assign(p.b.size(), 0);
    x.h.assign(p.edges.size(), 0);
    return x;
}

bool weight_balance_holds(double lhs, double rhs) {
    return lhs >= rhs - 1e-9 * std::max(1.0, std::abs(rhs));
}

std::vector<std::string> check_assignment(const ComparisonProblem& p, const Assignment& x) {
    std::vector<std::string> bad;
    if (x.b.size() != p.b.size() || x.c_b.size() != p.b.size() || x.c_a.size() != p.a.size() ||
        x.h.size() != p.edges.size()) {
        bad.push_back("shape: vector sizes do not match the problem");
        return bad;
    }
    auto binary = [&](const std::vector<std::uint8_t>& v, const char* name) {
        for (auto e : v) {
            if (e > 1) {
                bad.push_back(std::string("binary: ") + name + " has a non-binary entry");
                return;
            }
        }
    };
    binary(x.b, "b");
    binary(x.c_a, "c_a");
    binary(x.c_b, "c_b");
    binary(x.h, "h");

    std::vector<int> covered(p.b.size(), 0), used(p.a.size(), 0);
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        if (!x.h[e]) continue;
        for (auto j : p.edges[e].b) ++covered[j];
        for (auto i : p.edges[e].a) ++used[i];
    }
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < p.b.size(); ++j) {
        if (x.c_b[j] && !p.b[j].weight) bad.push_back("c_b set on unweighted " + p.b[j].id);
        if (x.b[j] > covered[j] + x.c_b[j]) bad.push_back("C1 violated at " + p.b[j].id);
        if (x.c_b[j] && p.b[j].weight) rhs += *p.b[j].weight;
    }
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (x.c_a[i] && !p.a[i].weight) bad.push_back("c_a set on unweighted " + p.a[i].id);
        if (used[i] > 1 - x.c_a[i]) bad.push_back("C2 violated at " + p.a[i].id);
        if (x.c_a[i] && p.a[i].weight) lhs += *p.a[i].weight;
    }
    if (!weight_balance_holds(lhs, rhs)) bad.push_back("C3 violated: " + std::to_string(lhs) + " < " + std::to_string(rhs));
    std::int64_t sum = 0;
    for (auto v : x.b) sum += v;
    if (sum != x.objective) bad.push_back("objective differs from the number of selected b");
    return bad;
}

namespace {

// Min-cost flow with successive shortest paths (SPFA); unit augmentations.
class FlowNet {
public:
    explicit FlowNet(int n) : adj_(static_cast<std::size_t>(n)) {}

    int add(int u, int v, int cap, double cost) {
        const int id = static_cast<int>(arcs_.size());
        arcs_.push_back({v, cap, cost});
        arcs_.push_back({u, 0, -cost});
        adj_[static_cast<std::size_t>(u)].push_back(id);
        adj_[static_cast<std::size_t>(v)].push_back(id + 1);
        return id;
    }

    int flow_on(int arc) const { return arcs_[static_cast<std::size_t>(arc) ^ 1U].cap; }

    // Pushes unit paths while the accumulated cost stays within `budget`.
    int run(int s, int t, double budget) {
        const double inf = std::numeric_limits<double>::infinity();
        const std::size_t n = adj_.size();
        int flow = 0;
        double cost = 0.0;
        std::vector<double> dist(n);
        std::vector<int> pred(n);
        std::vector<char> in_queue(n);
        std::vector<int> relax_count(n);
        for (;;) {
            std::fill(dist.begin(), dist.end(), inf);
            std::fill(pred.begin(), pred.end(), -1);
            std::fill(in_queue.begin(), in_queue.end(), 0);
            std::fill(relax_count.begin(), relax_count.end(), 0);
            std::deque<int> q{s};
            dist[static_cast<std::size_t>(s)] = 0.0;
            while (!q.empty()) {
                const int u = q.front();
                q.pop_front();
                in_queue[static_cast<std::size_t>(u)] = 0;
                for (int id : adj_[static_cast<std::size_t>(u)]) {
                    const Arc& a = arcs_[static_cast<std::size_t>(id)];
                    if (a.cap <= 0) continue;
                    const double nd = dist[static_cast<std::size_t>(u)] + a.cost;
                    auto& dv = dist[static_cast<std::size_t>(a.to)];
                    // The slack guards against round-off cycles on the residual graph.
                    if (nd < dv - 1e-12 * (1.0 + std::abs(nd))) {
                        dv = nd;
                        pred[static_cast<std::size_t>(a.to)] = id;
                        if (!in_queue[static_cast<std::size_t>(a.to)] &&
                            ++relax_count[static_cast<std::size_t>(a.to)] <= static_cast<int>(n)) {
                            in_queue[static_cast<std::size_t>(a.to)] = 1;
                            q.push_back(a.to);
                        }
                    }
                }
            }
            const double d = dist[static_cast<std::size_t>(t)];
            if (d == inf || cost + d > budget) break;
            for (int v = t; v != s;) {
                const int id = pred[static_cast<std::size_t>(v)];
                arcs_[static_cast<std::size_t>(id)].cap -= 1;
                arcs_[static_cast<std::size_t>(id) ^ 1U].cap += 1;
                v = arcs_[static_cast<std::size_t>(id) ^ 1U].to;
            }
            cost += d;
            ++flow;
        }
        return flow;
    }

private:
    struct Arc {
        int to;
        int cap;
        double cost;
    };
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
};

// Best completion when all remaining many-to-many edges are off. `a_free` marks
// a-instances not consumed by chosen edges, `b_open` b-instances not yet covered.
//
// With `relaxed` set, returns an upper bound instead: each listed edge becomes a
// source of up to |open B_e| units at (weight of A_e) / |open B_e| per unit,
// never more than the edge really costs, and its a-instances stay available.
// `out` is only filled in the exact mode.
std::int64_t flow_network(const ComparisonProblem& p, const std::vector<char>& a_free, const std::vector<char>& b_open,
                          const std::vector<std::size_t>* relaxed, Assignment* out) {
    const int na = static_cast<int>(p.a.size());
    const int nb = static_cast<int>(p.b.size());
    const int nr = relaxed ? static_cast<int>(relaxed->size()) : 0;
    constexpr int S = 0, T = 1, W = 2;
    auto a_node = [](int i) { return 3 + i; };
    auto b_node = [na](int j) { return 3 + na + j; };
    FlowNet net(3 + na + nb + nr);

    double budget = 0.0;
    std::vector<int> source_arc(static_cast<std::size_t>(na), -1);
    for (int i = 0; i < na; ++i) {
        if (!a_free[static_cast<std::size_t>(i)]) continue;
        const auto& w = p.a[static_cast<std::size_t>(i)].weight;
        if (w) budget += *w;
        // Using a weighted a-instance in an edge gives up its weight in C3.
        source_arc[static_cast<std::size_t>(i)] = net.add(S, a_node(i), 1, w ? *w : 0.0);
    }
    std::vector<int> edge_arc(p.edges.size(), -1);
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        const auto& pe = p.edges[e];
        if (!pe.unit() || !a_free[pe.a[0]] || !b_open[pe.b[0]]) continue;
        edge_arc[e] = net.add(a_node(static_cast<int>(pe.a[0])), b_node(static_cast<int>(pe.b[0])), 1, 0.0);
    }
    int weighted_b = 0;
    std::vector<int> weight_arc(static_cast<std::size_t>(nb), -1);
    for (int j = 0; j < nb; ++j) {
        if (!b_open[static_cast<std::size_t>(j)]) continue;
        net.add(b_node(j), T, 1, 0.0);
        if (const auto& w = p.b[static_cast<std::size_t>(j)].weight) {
            weight_arc[static_cast<std::size_t>(j)] = net.add(W, b_node(j), 1, *w);
            ++weighted_b;
        }
    }
    if (weighted_b > 0) net.add(S, W, weighted_b, 0.0);
    for (int r = 0; r < nr; ++r) {
        const auto& pe = p.edges[(*relaxed)[static_cast<std::size_t>(r)]];
        int open = 0;
        for (auto j : pe.b) open += b_open[j] ? 1 : 0;
        if (open == 0) continue;
        double w = 0.0;
        for (auto i : pe.a) w += p.a[i].weight.value_or(0.0);
        const int m = 3 + na + nb + r;
        net.add(S, m, open, w / open);
        for (auto j : pe.b) {
            if (b_open[j]) net.add(m, b_node(static_cast<int>(j)), 1, 0.0);
        }
    }

    const int flow = net.run(S, T, budget + 1e-9 * std::max(1.0, budget));
    if (!out) return flow;

    Assignment& x = *out;
    x = Assignment::zeros(p);
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        if (edge_arc[e] >= 0 && net.flow_on(edge_arc[e]) > 0) {
            x.h[e] = 1;
            x.b[p.edges[e].b[0]] = 1;
        }
    }
    for (int j = 0; j < nb; ++j) {
        if (weight_arc[static_cast<std::size_t>(j)] >= 0 && net.flow_on(weight_arc[static_cast<std::size_t>(j)]) > 0) {
            x.c_b[static_cast<std::size_t>(j)] = 1;
            x.b[static_cast<std::size_t>(j)] = 1;
        }
    }
    for (int i = 0; i < na; ++i) {
        const int arc = source_arc[static_cast<std::size_t>(i)];
        if (arc >= 0 && p.a[static_cast<std::size_t>(i)].weight && net.flow_on(arc) == 0) {
            x.c_a[static_cast<std::size_t>(i)] = 1;
        }
    }
    return flow;
}

Assignment flow_completion(const ComparisonProblem& p, const std::vector<char>& a_free,
                           const std::vector<char>& b_open) {
    Assignment x;
    flow_network(p, a_free, b_open, nullptr, &x);
    return x;
}

class BranchAndBound {
public:
    BranchAndBound(const ComparisonProblem& p, std::int64_t budget_ms)
        : p_(p), deadline_(std::chrono::steady_clock::now() + std::chrono::milliseconds(budget_ms)) {
        for (std::size_t e = 0; e < p.edges.size(); ++e) {
            if (!p.edges[e].unit()) multi_.push_back(e);
        }
        best_ = Assignment::zeros(p);
    }

    void seed(const Assignment& x) { best_ = x; }

    void run() {
        std::vector<char> a_free(p_.a.size(), 1), b_open(p_.b.size(), 1);
        std::vector<std::size_t> chosen;
        dfs(0, a_free, b_open, chosen, 0);
    }

    const Assignment& best() const { return best_; }
    bool optimal() const { return !timed_out_; }
    std::int64_t nodes() const { return nodes_; }

private:
    bool usable(std::size_t e, const std::vector<char>& a_free) const {
        for (auto i : p_.edges[e].a) {
            if (!a_free[i]) return false;
        }
        return true;
    }

    bool covers_open(std::size_t e, const std::vector<char>& b_open) const {
        for (auto j : p_.edges[e].b) {
            if (b_open[j]) return true;
        }
        return false;
    }

    void dfs(std::size_t k, std::vector<char>& a_free, std::vector<char>& b_open, std::vector<std::size_t>& chosen,
             std::int64_t covered) {
        if (std::chrono::steady_clock::now() > deadline_ && nodes_ > 0) {
            timed_out_ = true;
            return;
        }
        ++nodes_;
        Assignment x = flow_completion(p_, a_free, b_open);
        std::int64_t flow = 0;
        for (auto v : x.b) flow += v;
        if (covered + flow > best_.objective) {
            for (auto e : chosen) {
                x.h[e] = 1;
                for (auto j : p_.edges[e].b) x.b[j] = 1;
            }
            x.objective = covered + flow;
            best_ = std::move(x);
        }

        std::vector<std::size_t> open_edges;
        for (std::size_t m = k; m < multi_.size(); ++m) {
            if (usable(multi_[m], a_free) && covers_open(multi_[m], b_open)) open_edges.push_back(multi_[m]);
        }
        if (open_edges.empty()) return;
        if (covered + flow_network(p_, a_free, b_open, &open_edges, nullptr) <= best_.objective) return;

        std::size_t m = k;
        while (m < multi_.size() && !(usable(multi_[m], a_free) && covers_open(multi_[m], b_open))) ++m;
        if (m == multi_.size()) return;
        const std::size_t e = multi_[m];

        // h_e = 1 first.
        std::vector<std::size_t> newly;
        for (auto i : p_.edges[e].a) a_free[i] = 0;
        for (auto j : p_.edges[e].b) {
            if (b_open[j]) {
                b_open[j] = 0;
                newly.push_back(j);
            }
        }
        chosen.push_back(e);
        dfs(m + 1, a_free, b_open, chosen, covered + static_cast<std::int64_t>(newly.size()));
        chosen.pop_back();
        for (auto j : newly) b_open[j] = 1;
        for (auto i : p_.edges[e].a) a_free[i] = 1;
        if (timed_out_) return;

        dfs(m + 1, a_free, b_open, chosen, covered);
    }

    const ComparisonProblem& p_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<std::size_t> multi_;
    Assignment best_;
    std::int64_t nodes_ = 0;
    bool timed_out_ = false;
};

}  // namespace

MatchResult solve(const ComparisonProblem& p, const SolveOptions& opts) {
    validate_problem(p);
    const auto t0 = std::chrono::steady_clock::now();
    BranchAndBound bb(p, opts.time_budget_ms);
    if (opts.warm_start && check_assignment(p, *opts.warm_start).empty()) bb.seed(*opts.warm_start);
    bb.run();

    MatchResult r;
    r.assignment = bb.best();
    r.optimal = bb.optimal();
    r.nodes_explored = bb.nodes();

    std::vector<char> a_in(p.a.size(), 0);
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        if (!r.assignment.h[e]) continue;
        for (auto i : p.edges[e].a) a_in[i] = 1;
    }
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        (a_in[i] || r.assignment.c_a[i] ? r.a_delta : r.unmatched_a).push_back(p.a[i].id);
    }
    for (std::size_t j = 0; j < p.b.size(); ++j) {
        (r.assignment.b[j] ? r.b_delta : r.unmatched_b).push_back(p.b[j].id);
    }
    r.verdict = r.unmatched_b.empty() ? Verdict::Proven : Verdict::Inconclusive;
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::int64_t brute_force_optimum(const ComparisonProblem& p) {
    validate_problem(p);
    const std::size_t n = p.variable_count();
    if (n > 24) throw std::invalid_argument("brute force refuses " + std::to_string(n) + " variables (max 24)");
    const std::size_t nb = p.b.size(), na = p.a.size(), ne = p.edges.size();
    // Bit layout: b | c_a | c_b | h.
    const std::size_t off_ca = nb, off_cb = nb + na, off_h = nb + na + nb;
    std::vector<std::uint32_t> cover(nb, 0), use(na, 0);
    for (std::size_t e = 0; e < ne; ++e) {
        for (auto j : p.edges[e].b) cover[j] |= 1U << e;
        for (auto i : p.edges[e].a) use[i] |= 1U << e;
    }
    std::int64_t best = 0;
    const std::uint32_t total = 1U << n;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        const std::uint32_t bmask = mask & ((1U << nb) - 1U);
        const int obj = std::popcount(bmask);
        if (obj <= best) continue;
        const std::uint32_t h = mask >> off_h;
        bool ok = true;
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t j = 0; j < nb && ok; ++j) {
            const bool cb = (mask >> (off_cb + j)) & 1U;
            if (cb && !p.b[j].weight) ok = false;
            if (cb && ok) rhs += *p.b[j].weight;
            if (((bmask >> j) & 1U) && !cb && !(h & cover[j])) ok = false;
        }
        for (std::size_t i = 0; i < na && ok; ++i) {
            const bool ca = (mask >> (off_ca + i)) & 1U;
            if (ca && !p.a[i].weight) ok = false;
            const int uses = std::popcount(h & use[i]);
            if (uses > 1 - static_cast<int>(ca)) ok = false;
            if (ca && ok) lhs += *p.a[i].weight;
        }
        if (ok && weight_balance_holds(lhs, rhs)) best = obj;
    }
    return best;
}

Resolved apply_rule_and_resolve(const ComparisonProblem& p, const MatchResult& previous, const HeuristicEdge& rule,
                                std::int64_t time_budget_ms) {
    Resolved out{p, {}};
    add_edge(out.problem, rule);
    SolveOptions opts;
    opts.time_budget_ms = time_budget_ms;
    Assignment warm = previous.assignment;
    warm.h.resize(out.problem.edges.size(), 0);
    opts.warm_start = std::move(warm);
    out.result = solve(out.problem, opts);
    return out;
}

std::string_view to_string(Verdict v) { return v == Verdict::Proven ? "proven" : "inconclusive"; }

void to_json(json& j, const ComparisonProblem& p) {
    auto nodes = [](const std::vector<ProblemNode>& v) {
        json arr = json::array();
        for (const auto& n : v) arr.push_back({{"id", n.id}, {"weight", n.weight ? json(*n.weight) : json(nullptr)}});
        return arr;
    };
    json edges = json::array();
    for (const auto& e : p.edges) {
        json a = json::array(), b = json::array();
        for (auto i : e.a) a.push_back(p.a[i].id);
        for (auto k : e.b) b.push_back(p.b[k].id);
        edges.push_back({{"id", e.edge_id}, {"kind", to_string(e.kind)}, {"a", a}, {"b", b}, {"rationale", e.rationale}});
    }
    j = json{{"direction", p.direction == Dominance::AGeB ? "A>=B" : "B>=A"},
             {"a", nodes(p.a)},
             {"b", nodes(p.b)},
             {"edges", edges},
             {"variables", p.variable_count()},
             {"constraints", p.constraint_count()}};
}

json assignment_json(const ComparisonProblem& p, const Assignment& x) {
    json b = json::object(), ca = json::object(), cb = json::object(), h = json::object();
    for (std::size_t j = 0; j < p.b.size(); ++j) {
        b[p.b[j].id] = x.b[j];
        cb[p.b[j].id] = x.c_b[j];
    }
    for (std::size_t i = 0; i < p.a.size(); ++i) ca[p.a[i].id] = x.c_a[i];
    for (std::size_t e = 0; e < p.edges.size(); ++e) h[p.edges[e].edge_id] = x.h[e];
    return json{{"b", b}, {"c_a", ca}, {"c_b", cb}, {"h", h}, {"objective", x.objective}};
}

json result_json(const ComparisonProblem& p, const MatchResult& r) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (r.assignment.c_a[i] && p.a[i].weight) lhs += *p.a[i].weight;
    }
    for (std::size_t j = 0; j < p.b.size(); ++j) {
        if (r.assignment.c_b[j] && p.b[j].weight) rhs += *p.b[j].weight;
    }
    return json{{"direction", p.direction == Dominance::AGeB ? "A>=B" : "B>=A"},
                {"verdict", to_string(r.verdict)},
                {"objective", r.objective()},
                {"b_total", p.b.size()},
                {"optimal", r.optimal},
                {"nodes_explored", r.nodes_explored},
                {"a_delta", r.a_delta},
                {"b_delta", r.b_delta},
                {"unmatched_a", r.unmatched_a},
                {"unmatched_b", r.unmatched_b},
                {"weight_balance", {{"a_selected", lhs}, {"b_selected", rhs}}},
                {"assignment", assignment_json(p, r.assignment)}};
}

}  // namespace delta_lca
