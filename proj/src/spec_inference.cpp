// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/spec_inference.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "delta_lca/error.hpp"
#include "delta_lca/fuzzy.hpp"

namespace delta_lca {

DieCoefficientTable::DieCoefficientTable(std::map<std::string, double> entries) : entries_(std::move(entries)) {
    for (const auto& [k, v] : entries_) {
        if (!(v > 0.0 && v <= 1.0)) {
            throw ConfigError("die coefficient for " + k + " must be in (0, 1], got " + std::to_string(v));
        }
    }
}

DieCoefficientTable DieCoefficientTable::from_json(const nlohmann::json& j) {
    const auto& body = j.contains("coefficients") ? j.at("coefficients") : j;
    std::map<std::string, double> entries;
    for (const auto& [k, v] : body.items()) {
        if (v.is_number()) entries[k] = v.get<double>();
    }
    return DieCoefficientTable(std::move(entries));
}

DieCoefficientTable DieCoefficientTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open die coefficient table " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad die coefficient table " + path + ": " + e.what());
    }
}

DieEstimate infer_die_area(std::string_view package_type, PackageDims dims, const DieCoefficientTable& table) {
    if (!(dims.width >= 0.0) || (dims.height && !(*dims.height >= 0.0))) {
        throw std::invalid_argument("package dimensions must be nonnegative");
    }
    std::vector<std::string> keys;
    for (const auto& [k, v] : table.entries()) keys.push_back(k);
    auto m = fuzzy::best_match(package_type, keys);
    if (!m) throw UnknownPackage("unknown package '" + std::string(package_type) + "'");

    const std::string& key = keys[m->index];
    const double coefficient = table.entries().at(key);
    const double area = dims.height ? dims.width * *dims.height : dims.width * dims.width;
    return {area * coefficient, key, coefficient};
}

ProcessNodeDataset::ProcessNodeDataset(std::vector<ProcessNodeRow> rows) : rows_(std::move(rows)) {
    for (const auto& r : rows_) {
        if (!(r.node_nm >= 14.0 && r.node_nm <= 350.0)) {
            throw ConfigError("process node for " + r.series + " outside 14..350 nm");
        }
        if (!(r.fmax_mhz > 0.0) || !(r.ma_per_mhz > 0.0)) {
            throw ConfigError("frequency and current for " + r.series + " must be > 0");
        }
    }
}

ProcessNodeDataset ProcessNodeDataset::from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<ProcessNodeRow> rows;
    bool header = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            if (line.rfind("series", 0) == 0) continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) {
            throw ConfigError("process node dataset line " + std::to_string(line_no) + ": expected 4 columns");
        }
        try {
            rows.push_back({cells[0], std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])});
        } catch (const std::exception&) {
            throw ConfigError("process node dataset line " + std::to_string(line_no) + ": bad number");
        }
    }
    return ProcessNodeDataset(std::move(rows));
}

ProcessNodeDataset ProcessNodeDataset::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open process node dataset " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_csv(buf.str());
}

NodeEstimate infer_process_node(double max_frequency_mhz, double current_per_mhz, const ProcessNodeDataset& dataset) {
    if (!(max_frequency_mhz > 0.0) || !(current_per_mhz > 0.0)) {
        throw std::invalid_argument("frequency and current per MHz must be > 0");
    }
    if (dataset.rows().empty()) throw ConfigError("process node dataset is empty");

    const double fx = std::log10(max_frequency_mhz);
    const double cy = std::log10(current_per_mhz);
    const ProcessNodeRow* best = nullptr;
    double best_d = 0.0;
    for (const auto& r : dataset.rows()) {
        const double d = std::hypot(std::log10(r.fmax_mhz) - fx, std::log10(r.ma_per_mhz) - cy);
        if (!best || std::tie(d, r.node_nm, r.series) < std::tie(best_d, best->node_nm, best->series)) {
            best = &r;
            best_d = d;
        }
    }
    return {best->node_nm, best->series, best_d};
}

}  // namespace delta_lca
