// SPDX-License-Identifier: Apache-2.0
// Python extension. Structured values cross the boundary as JSON text; the
// pure-Python wrapper in delta_lca/__init__.py decodes them.
#include <map>
#include <memory>
#include <mutex>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delta_lca/ei_estimator.hpp"
#include "delta_lca/error.hpp"
#include "delta_lca/match_solver.hpp"
#include "delta_lca/pipeline.hpp"

namespace py = pybind11;
using namespace delta_lca;
using nlohmann::json;

namespace {

// Engines are cached per (config, offline) since loading tables is not free.
const Engine& engine_for(const std::string& config, bool offline) {
    static std::mutex mu;
    static std::map<std::pair<std::string, bool>, std::unique_ptr<Engine>> cache;
    std::lock_guard lock(mu);
    const std::string path = config.empty() ? Config::default_path().string() : config;
    auto& slot = cache[{path, offline}];
    if (!slot) slot = std::make_unique<Engine>(Config::load(path), offline);
    return *slot;
}

DesignInventory prepared(const Engine& e, const std::string& bytes, const std::string& format,
                         const std::string& source, std::vector<std::string>& warnings) {
    return e.prepare(e.parse(bytes, design_format_from_string(format), source, &warnings), &warnings);
}

// {"direction": "A>=B", "a": [{"id", "weight"}], "b": [...], "edges": [{"id", "a": [...], "b": [...]}]}
ComparisonProblem problem_from_json(const json& j) {
    ComparisonProblem p;
    p.direction = j.value("direction", std::string("A>=B")) == "B>=A" ? Dominance::BGeA : Dominance::AGeB;
    for (const char* side : {"a", "b"}) {
        auto& nodes = side[0] == 'a' ? p.a : p.b;
        for (const auto& n : j.at(side)) {
            ProblemNode node{n.at("id").get<std::string>(), std::nullopt};
            if (n.contains("weight") && !n.at("weight").is_null()) node.weight = n.at("weight").get<double>();
            nodes.push_back(std::move(node));
        }
    }
    for (const auto& e : j.value("edges", json::array())) {
        HeuristicEdge h;
        h.edge_id = e.at("id").get<std::string>();
        h.kind = edge_kind_from_string(e.value("kind", std::string(to_string(EdgeKind::UserRule))));
        h.direction = p.direction;
        h.a_instances = e.at("a").get<std::vector<std::string>>();
        h.b_instances = e.at("b").get<std::vector<std::string>>();
        add_edge(p, h);
    }
    validate_problem(p);
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Comparative footprint engine for PCB designs";

    static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
    static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::object exc = py::reinterpret_borrow<py::object>(parse_error.ptr())(e.what());
            exc.attr("offset") = e.offset();
            PyErr_SetObject(parse_error.ptr(), exc.ptr());
        } catch (const ValidationError& e) {
            py::set_error(validation_error, e.what());
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def("default_config", [] { return Config::default_path().string(); });

    m.def(
        "inventory",
        [](const py::bytes& content, const std::string& format, const std::string& source, const std::string& config,
           bool offline) {
            const std::string bytes = content;
            py::gil_scoped_release release;
            const Engine& e = engine_for(config, offline);
            std::vector<std::string> warnings;
            json out = prepared(e, bytes, format, source, warnings);
            out["warnings"] = warnings;
            return out.dump();
        },
        py::arg("content"), py::arg("format") = "auto", py::arg("source") = "design", py::arg("config") = "",
        py::arg("offline") = true);

    m.def(
        "footprint",
        [](const py::bytes& content, const std::string& format, const std::string& source, const std::string& config,
           bool offline) {
            const std::string bytes = content;
            py::gil_scoped_release release;
            const Engine& e = engine_for(config, offline);
            std::vector<std::string> warnings;
            const auto inv = prepared(e, bytes, format, source, warnings);
            json parts = json::array();
            for (const auto& p : inv.parts) {
                parts.push_back({{"part_id", p.part_id},
                                 {"quantity", p.quantity},
                                 {"per_piece_g", p.footprint_estimate ? json(*p.footprint_estimate) : json(nullptr)},
                                 {"provenance", to_string(p.footprint_provenance)}});
            }
            return json{{"design_id", inv.design_id}, {"parts", parts}, {"totals", total_footprint(inv)},
                        {"warnings", warnings}}
                .dump();
        },
        py::arg("content"), py::arg("format") = "auto", py::arg("source") = "design", py::arg("config") = "",
        py::arg("offline") = true);

    m.def(
        "compare",
        [](const py::bytes& a, const py::bytes& b, const std::string& direction, const std::string& rules,
           const std::string& format_a, const std::string& format_b, const std::string& config, bool offline) {
            const std::string bytes_a = a, bytes_b = b;
            py::gil_scoped_release release;
            const Engine& e = engine_for(config, offline);
            std::vector<std::string> warnings;
            const auto inv_a = prepared(e, bytes_a, format_a, "A", warnings);
            const auto inv_b = prepared(e, bytes_b, format_b, "B", warnings);
            const auto user_rules = rules.empty() ? std::vector<UserRule>{} : rules_from_json(json::parse(rules));
            const auto o = compare_designs(inv_a, inv_b, user_rules, direction_from_string(direction),
                                           e.edge_params(), e.config().time_budget_ms);
            json report = comparison_report(o, inv_a, inv_b, user_rules);
            report["warnings"] = warnings;
            return report.dump();
        },
        py::arg("a"), py::arg("b"), py::arg("direction") = "auto", py::arg("rules") = "", py::arg("format_a") = "auto",
        py::arg("format_b") = "auto", py::arg("config") = "", py::arg("offline") = true);

    m.def(
        "solve",
        [](const std::string& problem, std::int64_t time_budget_ms) {
            const auto p = problem_from_json(json::parse(problem));
            py::gil_scoped_release release;
            return result_json(p, solve(p, SolveOptions{time_budget_ms, std::nullopt})).dump();
        },
        py::arg("problem"), py::arg("time_budget_ms") = 10000);

    m.def(
        "brute_force_optimum",
        [](const std::string& problem) { return brute_force_optimum(problem_from_json(json::parse(problem))); },
        py::arg("problem"));
}
