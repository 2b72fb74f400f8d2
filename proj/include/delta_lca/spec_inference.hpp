// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "delta_lca/error.hpp"

namespace delta_lca {

/// Fraction of package area occupied by silicon, per package family.
class DieCoefficientTable {
public:
    DieCoefficientTable() = default;
    explicit DieCoefficientTable(std::map<std::string, double> entries);

    static DieCoefficientTable from_json(const nlohmann::json& j);
    static DieCoefficientTable load(const std::string& path);

    const std::map<std::string, double>& entries() const { return entries_; }

private:
    std::map<std::string, double> entries_;
};

struct PackageDims {
    double width = 0.0;                  // mm
    std::optional<double> height;        // mm; square package when absent
};

struct DieEstimate {
    double die_area = 0.0;  // mm²
    std::string matched_type;
    double coefficient = 0.0;
};

class UnknownPackage : public Error {
public:
    using Error::Error;
};

/// Area is width² for a single dimension, width × height otherwise, scaled by
/// the coefficient of the closest table key. Throws UnknownPackage when no key
/// is similar enough.
DieEstimate infer_die_area(std::string_view package_type, PackageDims dims, const DieCoefficientTable& table);

struct ProcessNodeRow {
    std::string series;
    double node_nm = 0.0;
    double fmax_mhz = 0.0;
    double ma_per_mhz = 0.0;
};

class ProcessNodeDataset {
public:
    ProcessNodeDataset() = default;
    explicit ProcessNodeDataset(std::vector<ProcessNodeRow> rows);

    /// CSV with header `series,node_nm,fmax_mhz,ma_per_mhz`.
    static ProcessNodeDataset from_csv(std::string_view text);
    static ProcessNodeDataset load(const std::string& path);

    const std::vector<ProcessNodeRow>& rows() const { return rows_; }

private:
    std::vector<ProcessNodeRow> rows_;
};

struct NodeEstimate {
    double node_nm = 0.0;
    std::string neighbor;
    double distance = 0.0;
};

/// Nearest dataset row in (log10 MHz, log10 mA/MHz). Ties go to the smaller
/// node, then the lexicographically smaller series name.
NodeEstimate infer_process_node(double max_frequency_mhz, double current_per_mhz, const ProcessNodeDataset& dataset);

}  // namespace delta_lca
