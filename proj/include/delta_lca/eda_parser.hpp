// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delta_lca/inventory.hpp"
#include "delta_lca/packages.hpp"

namespace delta_lca {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// One placed element as read from a layout file, before categorization.
struct RawElement {
    std::string designator;
    std::string library_footprint;
    std::string part_name;  // MPN attribute, else the element value
    int pad_count = 0;
    std::vector<Point> pads;  // pad centers in package coordinates
    double bbox_width = 0.0;  // silkscreen extent, mm
    double bbox_height = 0.0;
    bool has_bbox = false;
    Point position;
    int connected_net_count = 0;
};

enum class DesignFormat { EagleBrd, NeutralJson, Auto };

struct Classification {
    PartCategory category;
    std::optional<std::string> passive_code;
    std::string rule;            // "prefix", "topology", "correlation" or "default"
    bool mcu_candidate = false;  // highest connection density on the board
};

struct PackageMeasure {
    std::string package_type;
    double package_area = 0.0;
    bool zero_size = false;
};

struct ParseOptions {
    PackageNormalizer normalizer;
    /// Case-insensitive patterns checked against designator, footprint and
    /// part name; a match drops the element from the inventory.
    std::vector<std::string> exclusion_patterns{"FIDUCIAL", "^FID[0-9]*$", "HOLE", "MOUNT", "STANDOFF", "LOGO"};
};

/// Raw content of an EAGLE .brd before categorization.
struct BoardLayout {
    BoardSpec board;
    std::vector<RawElement> elements;
};

/// Three non-collinear pad centers whose pairwise distances stay within a
/// factor of two of each other.
bool is_triangular(std::span<const Point> pads);

/// Point-symmetric pad set arranged as two parallel rows of equal length.
bool is_symmetric_dual_row(std::span<const Point> pads);

/// Precedence: designator prefix, then footprint topology, then connection
/// density across `all`, else Misc. Independent of the order of `all`.
Classification categorize_element(const RawElement& e, std::span<const RawElement> all);

PackageMeasure measure_package(const RawElement& e, const PackageNormalizer& normalizer);

bool is_excluded(const RawElement& e, const ParseOptions& options);

/// Reads board outline, copper layers and placed elements of an EAGLE 6+ XML board.
/// Throws ParseError on malformed XML or a missing outline.
BoardLayout read_eagle_layout(std::string_view bytes);

/// Categorizes, measures and merges elements into parts. Passives of the same
/// (kind, size code) become one part; other duplicates merge on
/// (category, part name, footprint). A BoardSubstrate part is appended.
DesignInventory assemble_inventory(std::string design_id, std::string source_file, const BoardLayout& layout,
                                   const ParseOptions& options, std::vector<std::string>* warnings = nullptr);

DesignInventory parse_design(std::string_view bytes, DesignFormat format, const ParseOptions& options,
                             std::string source_file = {}, std::vector<std::string>* warnings = nullptr);

DesignFormat design_format_from_string(std::string_view s);

}  // namespace delta_lca
