// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "delta_lca/compare_service.hpp"
#include "delta_lca/error.hpp"
#include "delta_lca/pipeline.hpp"

namespace delta_lca::cli {

using nlohmann::json;

namespace {

struct Common {
    std::string config;
    bool offline = false;
    std::string format = "auto";
    std::string output;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Config file (defaults to the bundled data/config.json)");
    cmd->add_flag("--offline", c.offline, "Use the fixture catalog; never touch the network");
    cmd->add_option("--format", c.format, "Input format: auto, eagle or json")
        ->check(CLI::IsMember({"auto", "eagle", "brd", "json"}));
}

Engine make_engine(const Common& c) {
    return Engine(Config::load(c.config.empty() ? Config::default_path() : std::filesystem::path(c.config)), c.offline);
}

DesignInventory load(const Engine& engine, const std::string& path, const std::string& format,
                     std::vector<std::string>& warnings) {
    const std::string bytes = read_file(path);
    auto inv = engine.parse(bytes, design_format_from_string(format), path, &warnings);
    return engine.prepare(std::move(inv), &warnings);
}

void emit(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << j.dump(2) << '\n';
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Comparative carbon footprint of two PCB designs", "delta-lca"};
    app.require_subcommand(1);

    Common inv_opts, fp_opts, cmp_opts, srv_opts;

    std::string inv_file;
    auto* inventory = app.add_subcommand("inventory", "Extract the part inventory of a design");
    inventory->add_option("file", inv_file, "Design file")->required();
    inventory->add_option("-o,--output", inv_opts.output, "Write JSON here instead of stdout");
    add_common(inventory, inv_opts);

    std::string fp_file;
    auto* footprint = app.add_subcommand("footprint", "Estimate per-part and total footprints");
    footprint->add_option("file", fp_file, "Design file")->required();
    footprint->add_option("-o,--output", fp_opts.output, "Write JSON here instead of stdout");
    add_common(footprint, fp_opts);

    std::string file_a, file_b, direction = "auto", rules_path, report_path;
    auto* compare = app.add_subcommand("compare", "Try to prove that one design has at least the impact of the other");
    compare->add_option("a", file_a, "Design A")->required();
    compare->add_option("b", file_b, "Design B")->required();
    compare->add_option("--direction", direction, "a-ge-b, b-ge-a or auto")
        ->check(CLI::IsMember({"a-ge-b", "b-ge-a", "auto"}));
    compare->add_option("--rules", rules_path, "JSON file with user rules");
    compare->add_option("--report", report_path, "Write the full comparison report here");
    compare->add_option("-o,--output", cmp_opts.output, "Write the match result here instead of stdout");
    add_common(compare, cmp_opts);

    int port = -1;
    std::string data_dir, bind;
    auto* serve = app.add_subcommand("serve", "Run the local comparison service");
    serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--data-dir", data_dir, "Session snapshot directory");
    serve->add_option("--bind", bind, "Address to bind (loopback by default)");
    serve->add_option("--config", srv_opts.config, "Config file");
    serve->add_flag("--offline", srv_opts.offline, "Use the fixture catalog");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        std::vector<std::string> warnings;
        if (inventory->parsed()) {
            const Engine engine = make_engine(inv_opts);
            auto inv = engine.parse(read_file(inv_file), design_format_from_string(inv_opts.format), inv_file, &warnings);
            inv = engine.enrich(std::move(inv), &warnings);
            print_warnings(warnings, err);
            emit(inv, inv_opts.output, out);
            return kExitOk;
        }
        if (footprint->parsed()) {
            const Engine engine = make_engine(fp_opts);
            const auto inv = load(engine, fp_file, fp_opts.format, warnings);
            json parts = json::array();
            for (const auto& p : inv.parts) {
                parts.push_back({{"part_id", p.part_id},
                                 {"quantity", p.quantity},
                                 {"per_piece_g", p.footprint_estimate ? json(*p.footprint_estimate) : json(nullptr)},
                                 {"provenance", to_string(p.footprint_provenance)}});
            }
            json result{{"design_id", inv.design_id}, {"parts", parts}, {"totals", total_footprint(inv)}};
            print_warnings(warnings, err);
            emit(result, fp_opts.output, out);
            return kExitOk;
        }
        if (compare->parsed()) {
            const Engine engine = make_engine(cmp_opts);
            const auto a = load(engine, file_a, cmp_opts.format, warnings);
            const auto b = load(engine, file_b, cmp_opts.format, warnings);
            std::vector<UserRule> rules;
            if (!rules_path.empty()) rules = rules_from_json(json::parse(read_file(rules_path)));
            const auto outcome = compare_designs(a, b, rules, direction_from_string(direction), engine.edge_params(),
                                                 engine.config().time_budget_ms);
            print_warnings(warnings, err);
            if (!report_path.empty()) {
                json report = comparison_report(outcome, a, b, rules);
                report["timing"] = {{"wall_time_ms", outcome.result.wall_time_ms}};
                emit(report, report_path, out);
            }
            emit(result_json(outcome.problem, outcome.result), cmp_opts.output, out);
            return outcome.result.verdict == Verdict::Proven ? kExitOk : kExitInconclusive;
        }
        if (serve->parsed()) {
            Config cfg = Config::load(srv_opts.config.empty() ? Config::default_path()
                                                              : std::filesystem::path(srv_opts.config));
            if (!data_dir.empty()) cfg.data_dir = data_dir;
            if (!bind.empty()) cfg.bind = bind;
            if (port >= 0) cfg.port = port;
            const Engine engine(cfg, srv_opts.offline);
            SessionStore store(engine, cfg.data_dir, cfg.time_budget_ms);
            HttpService service(store);
            const int bound = service.bind(cfg.bind, cfg.port);
            if (bound < 0) throw Error("cannot bind " + cfg.bind + ":" + std::to_string(cfg.port));
            out << "listening on http://" << cfg.bind << ":" << bound << std::endl;
            service.listen();
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitUsage;
}

}  // namespace delta_lca::cli
