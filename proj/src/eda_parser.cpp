// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/eda_parser.hpp"

#include <expat.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <tuple>

#include "delta_lca/error.hpp"

namespace delta_lca {

namespace {

constexpr int kTopLayer = 1;
constexpr int kBottomLayer = 16;
constexpr int kDimensionLayer = 20;
constexpr int kPlaceLayer = 21;  // tPlace
constexpr int kDocuLayer = 51;   // tDocu

struct Extent {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    bool empty() const { return !(min_x <= max_x); }
    void add(double x, double y) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }
    double width() const { return empty() ? 0.0 : max_x - min_x; }
    double height() const { return empty() ? 0.0 : max_y - min_y; }
};

struct PackageDef {
    std::vector<Point> pads;
    Extent docu;
    Extent place;
};

struct ElementDef {
    std::string name;
    std::string package_key;
    std::string footprint;
    std::string value;
    std::string mpn;
    double x = 0.0;
    double y = 0.0;
    bool quarter_turn = false;
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

class EagleReader {
public:
    EagleReader() : parser_(XML_ParserCreate(nullptr)) {
        XML_SetUserData(parser_.get(), this);
        XML_SetElementHandler(parser_.get(), &EagleReader::on_start, &EagleReader::on_end);
    }

    BoardLayout read(std::string_view bytes) {
        if (bytes.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
            throw ParseError("board file too large", 0);
        }
        if (XML_Parse(parser_.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) == XML_STATUS_ERROR) {
            const auto offset = XML_GetCurrentByteIndex(parser_.get());
            throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser_.get())),
                             offset < 0 ? 0 : static_cast<std::size_t>(offset));
        }
        if (!saw_root_) throw ParseError("not an EAGLE board: missing <eagle> root", 0);
        if (outline_.empty()) throw ParseError("no outline", bytes.size());
        return finish();
    }

private:
    struct ParserDeleter {
        void operator()(XML_Parser p) const { XML_ParserFree(p); }
    };

    static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
        static_cast<EagleReader*>(self)->start(name, attrs);
    }
    static void XMLCALL on_end(void* self, const XML_Char* name) { static_cast<EagleReader*>(self)->end(name); }

    static const char* attr(const XML_Char** attrs, std::string_view key) {
        for (int i = 0; attrs[i] != nullptr; i += 2) {
            if (key == attrs[i]) return attrs[i + 1];
        }
        return nullptr;
    }
    static double num(const XML_Char** attrs, std::string_view key) {
        const char* v = attr(attrs, key);
        return v ? std::strtod(v, nullptr) : 0.0;
    }
    static int layer_of(const XML_Char** attrs) {
        const char* v = attr(attrs, "layer");
        return v ? std::atoi(v) : -1;
    }

    bool inside(std::string_view tag) const { return std::find(stack_.begin(), stack_.end(), tag) != stack_.end(); }

    void add_silk(int layer, double x, double y) {
        if (layer == kDocuLayer) package_->docu.add(x, y);
        if (layer == kPlaceLayer) package_->place.add(x, y);
    }

    void start(std::string_view tag, const XML_Char** attrs) {
        if (stack_.empty() && tag == "eagle") saw_root_ = true;

        if (tag == "layer" && inside("layers")) {
            const int number = std::atoi(attr(attrs, "number") ? attr(attrs, "number") : "0");
            if (number >= kTopLayer && number <= kBottomLayer) {
                if (const char* active = attr(attrs, "active")) {
                    saw_active_flag_ = true;
                    if (std::string_view(active) == "yes") active_layers_.insert(number);
                }
            }
        } else if (tag == "library" && inside("libraries")) {
            library_ = attr(attrs, "name") ? attr(attrs, "name") : "";
        } else if (tag == "package" && inside("libraries")) {
            const std::string key = library_ + "/" + (attr(attrs, "name") ? attr(attrs, "name") : "");
            package_ = &packages_[key];
        } else if (package_ != nullptr && (tag == "smd" || tag == "pad")) {
            package_->pads.push_back({num(attrs, "x"), num(attrs, "y")});
        } else if (package_ != nullptr && tag == "wire") {
            const int layer = layer_of(attrs);
            add_silk(layer, num(attrs, "x1"), num(attrs, "y1"));
            add_silk(layer, num(attrs, "x2"), num(attrs, "y2"));
        } else if (package_ != nullptr && tag == "rectangle") {
            const int layer = layer_of(attrs);
            add_silk(layer, num(attrs, "x1"), num(attrs, "y1"));
            add_silk(layer, num(attrs, "x2"), num(attrs, "y2"));
        } else if (package_ != nullptr && tag == "circle") {
            const int layer = layer_of(attrs);
            const double r = num(attrs, "radius");
            add_silk(layer, num(attrs, "x") - r, num(attrs, "y") - r);
            add_silk(layer, num(attrs, "x") + r, num(attrs, "y") + r);
        } else if (inside("plain") && (tag == "wire" || tag == "rectangle") && layer_of(attrs) == kDimensionLayer) {
            outline_.add(num(attrs, "x1"), num(attrs, "y1"));
            outline_.add(num(attrs, "x2"), num(attrs, "y2"));
        } else if (tag == "element" && inside("elements")) {
            ElementDef e;
            e.name = attr(attrs, "name") ? attr(attrs, "name") : "";
            e.footprint = attr(attrs, "package") ? attr(attrs, "package") : "";
            e.package_key = std::string(attr(attrs, "library") ? attr(attrs, "library") : "") + "/" + e.footprint;
            e.value = attr(attrs, "value") ? attr(attrs, "value") : "";
            e.x = num(attrs, "x");
            e.y = num(attrs, "y");
            if (const char* rot = attr(attrs, "rot")) {
                std::string_view r(rot);
                while (!r.empty() && !std::isdigit(static_cast<unsigned char>(r.front()))) r.remove_prefix(1);
                const int angle = std::atoi(std::string(r).c_str());
                e.quarter_turn = (angle % 180) == 90;
            }
            elements_.push_back(std::move(e));
            in_element_ = true;
        } else if (tag == "attribute" && in_element_ && !elements_.empty()) {
            const char* n = attr(attrs, "name");
            const char* v = attr(attrs, "value");
            if (n && v && (upper(n) == "MPN" || upper(n) == "PARTNO" || upper(n) == "MANUFACTURER_PART_NUMBER")) {
                elements_.back().mpn = v;
            }
        } else if (tag == "signal" && inside("signals")) {
            signal_ = attr(attrs, "name") ? attr(attrs, "name") : "";
        } else if (tag == "contactref" && inside("signal")) {
            if (const char* el = attr(attrs, "element")) nets_[el].insert(signal_);
        } else if (inside("signal") && (tag == "wire" || tag == "via")) {
            const int layer = layer_of(attrs);
            if (layer >= kTopLayer && layer <= kBottomLayer) used_layers_.insert(layer);
        }
        stack_.emplace_back(tag);
    }

    void end(std::string_view tag) {
        if (!stack_.empty()) stack_.pop_back();
        if (tag == "package") package_ = nullptr;
        if (tag == "element") in_element_ = false;
    }

    BoardLayout finish() const {
        BoardLayout out;
        out.board.area = outline_.width() * outline_.height();
        int layers = 0;
        if (saw_active_flag_) {
            layers = static_cast<int>(active_layers_.size());
        } else {
            layers = static_cast<int>(used_layers_.size());
        }
        out.board.layer_count = std::max(layers, 1);

        for (const auto& e : elements_) {
            RawElement raw;
            raw.designator = e.name;
            raw.library_footprint = e.footprint;
            raw.part_name = !e.mpn.empty() ? e.mpn : e.value;
            raw.position = {e.x, e.y};
            if (auto it = packages_.find(e.package_key); it != packages_.end()) {
                const PackageDef& pkg = it->second;
                raw.pads = pkg.pads;
                raw.pad_count = static_cast<int>(pkg.pads.size());
                const Extent& silk = pkg.docu.empty() ? pkg.place : pkg.docu;
                raw.has_bbox = !silk.empty();
                raw.bbox_width = silk.width();
                raw.bbox_height = silk.height();
                if (e.quarter_turn) std::swap(raw.bbox_width, raw.bbox_height);
            }
            if (auto it = nets_.find(e.name); it != nets_.end()) {
                raw.connected_net_count = static_cast<int>(it->second.size());
            }
            out.elements.push_back(std::move(raw));
        }
        return out;
    }

    std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser_;
    std::vector<std::string> stack_;
    bool saw_root_ = false;
    bool saw_active_flag_ = false;
    std::set<int> active_layers_;
    std::set<int> used_layers_;
    Extent outline_;
    std::string library_;
    std::map<std::string, PackageDef> packages_;
    PackageDef* package_ = nullptr;
    std::vector<ElementDef> elements_;
    bool in_element_ = false;
    std::string signal_;
    std::map<std::string, std::set<std::string>> nets_;
};

std::string designator_prefix(std::string_view designator) {
    std::string out;
    for (unsigned char ch : designator) {
        if (!std::isalpha(ch)) break;
        out += static_cast<char>(std::toupper(ch));
    }
    return out;
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Total order used to pick the most densely connected element.
bool denser(const RawElement& a, const RawElement& b) {
    const double area_a = a.bbox_width * a.bbox_height;
    const double area_b = b.bbox_width * b.bbox_height;
    return std::tie(b.connected_net_count, area_b, a.designator) <
           std::tie(a.connected_net_count, area_a, b.designator);
}

std::string slug(std::string_view s) {
    std::string out;
    for (unsigned char ch : s) {
        if (std::isalnum(ch)) {
            out += static_cast<char>(std::toupper(ch));
        } else if (!out.empty() && out.back() != '-') {
            out += '-';
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "PART" : out;
}

std::string_view passive_kind_name(SubKind k) {
    switch (k) {
        case SubKind::Resistor: return "resistor";
        case SubKind::Capacitor: return "capacitor";
        case SubKind::Inductor: return "inductor";
        default: return "passive";
    }
}

}  // namespace

bool is_triangular(std::span<const Point> pads) {
    if (pads.size() != 3) return false;
    const double d[3] = {dist(pads[0], pads[1]), dist(pads[1], pads[2]), dist(pads[0], pads[2])};
    const double lo = std::min({d[0], d[1], d[2]});
    const double hi = std::max({d[0], d[1], d[2]});
    if (!(lo > 0.0) || hi / lo > 2.0 || hi / lo < 0.5) return false;
    const double cross = (pads[1].x - pads[0].x) * (pads[2].y - pads[0].y) -
                         (pads[1].y - pads[0].y) * (pads[2].x - pads[0].x);
    // |cross| is twice the triangle area; compare against the longest side squared.
    return std::abs(cross) > 0.05 * hi * hi;
}

bool is_symmetric_dual_row(std::span<const Point> pads) {
    if (pads.size() < 4 || pads.size() % 2 != 0) return false;
    Point c{0.0, 0.0};
    Extent ext;
    for (const auto& p : pads) {
        c.x += p.x;
        c.y += p.y;
        ext.add(p.x, p.y);
    }
    c.x /= static_cast<double>(pads.size());
    c.y /= static_cast<double>(pads.size());
    const double tol = 1e-3 + 0.01 * std::max(ext.width(), ext.height());

    for (const auto& p : pads) {
        const Point mirror{2.0 * c.x - p.x, 2.0 * c.y - p.y};
        const bool found = std::any_of(pads.begin(), pads.end(), [&](const Point& q) { return dist(q, mirror) <= tol; });
        if (!found) return false;
    }

    auto two_rows = [&](auto coord) {
        std::vector<double> values;
        for (const auto& p : pads) values.push_back(coord(p));
        std::sort(values.begin(), values.end());
        std::vector<std::pair<double, std::size_t>> rows;
        for (double v : values) {
            if (rows.empty() || v - rows.back().first > tol) {
                rows.push_back({v, 1});
            } else {
                ++rows.back().second;
            }
        }
        return rows.size() == 2 && rows[0].second == rows[1].second;
    };
    return two_rows([](const Point& p) { return p.x; }) || two_rows([](const Point& p) { return p.y; });
}

Classification categorize_element(const RawElement& e, std::span<const RawElement> all) {
    static const std::regex passive_designator(R"(^([RCL])[0-9]+)", std::regex::icase);
    const std::string prefix = designator_prefix(e.designator);

    // Designator prefix.
    std::smatch m;
    const auto code = PackageNormalizer::passive_size_code(e.library_footprint);
    if (std::regex_search(e.designator, m, passive_designator) && code) {
        const char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(m[1].str()[0])));
        const SubKind sub = kind == 'R' ? SubKind::Resistor : kind == 'C' ? SubKind::Capacitor : SubKind::Inductor;
        return {PartCategory::passive(sub), code, "prefix", false};
    }
    if (prefix == "J" || prefix == "X") return {PartCategory::misc(), std::nullopt, "prefix", false};

    const bool top = std::none_of(all.begin(), all.end(), [&](const RawElement& other) {
        return &other != &e && other.designator != e.designator && denser(other, e);
    });

    // Footprint topology.
    if (e.pad_count == 2) {
        if (prefix == "D" || prefix == "LED") return {PartCategory::active(SubKind::Diode), std::nullopt, "topology", false};
        return {PartCategory::misc(), std::nullopt, "topology", false};
    }
    if (e.pad_count == 3 && is_triangular(e.pads)) {
        return {PartCategory::active(SubKind::Transistor), std::nullopt, "topology", false};
    }
    if ((e.pad_count == 8 && is_symmetric_dual_row(e.pads)) || e.pad_count >= 16) {
        return {PartCategory::ic(), std::nullopt, "topology", top};
    }

    // Component correlation.
    if (top && e.pad_count >= 4) return {PartCategory::ic(), std::nullopt, "correlation", true};

    return {PartCategory::misc(), std::nullopt, "default", false};
}

PackageMeasure measure_package(const RawElement& e, const PackageNormalizer& normalizer) {
    PackageMeasure out;
    out.package_type = normalizer.normalize(e.library_footprint);
    out.package_area = e.has_bbox ? e.bbox_width * e.bbox_height : 0.0;
    out.zero_size = !(out.package_area > 0.0);
    if (out.zero_size) out.package_area = 0.0;
    return out;
}

bool is_excluded(const RawElement& e, const ParseOptions& options) {
    if (e.pad_count == 0) return true;
    for (const auto& pattern : options.exclusion_patterns) {
        const std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
        if (std::regex_search(e.designator, re) || std::regex_search(e.library_footprint, re) ||
            std::regex_search(e.part_name, re)) {
            return true;
        }
    }
    return false;
}

BoardLayout read_eagle_layout(std::string_view bytes) { return EagleReader{}.read(bytes); }

DesignInventory assemble_inventory(std::string design_id, std::string source_file, const BoardLayout& layout,
                                   const ParseOptions& options, std::vector<std::string>* warnings) {
    std::vector<RawElement> kept;
    for (const auto& e : layout.elements) {
        if (!is_excluded(e, options)) kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end(),
              [](const RawElement& a, const RawElement& b) { return a.designator < b.designator; });

    struct Group {
        Part part;
    };
    std::map<std::string, Group> groups;
    for (const auto& e : kept) {
        const Classification cls = categorize_element(e, kept);
        const PackageMeasure pm = measure_package(e, options.normalizer);
        if (pm.zero_size && warnings) warnings->push_back(e.designator + ": zero-size silkscreen, package_area set to 0");

        std::string key;
        Part seed;
        seed.category = cls.category;
        seed.designator_prefix = designator_prefix(e.designator);
        if (cls.category.is_passive()) {
            key = "passive/" + std::string(passive_kind_name(cls.category.kind)) + "/" + *cls.passive_code;
            seed.part_id = slug(std::string(passive_kind_name(cls.category.kind)) + "-" + *cls.passive_code);
            seed.name = std::string(passive_kind_name(cls.category.kind)) + " " + *cls.passive_code;
            seed.package_type = *cls.passive_code;
        } else {
            const std::string name = e.part_name.empty() ? e.library_footprint : e.part_name;
            key = to_string(cls.category) + "/" + name + "/" + e.library_footprint;
            seed.part_id = slug(name) + "-" + slug(e.library_footprint);
            seed.name = name;
            seed.package_type = pm.package_type;
            if (cls.category.is_ic()) seed.attributes.pin_count = e.pad_count;
        }
        seed.package_area = pm.package_area;
        seed.quantity = 0;

        auto [it, inserted] = groups.try_emplace(key, Group{seed});
        it->second.part.quantity += 1;
        it->second.part.designators.push_back(e.designator);
    }

    DesignInventory inv;
    inv.design_id = std::move(design_id);
    inv.source_file = std::move(source_file);
    inv.board = layout.board;

    std::set<std::string> used_ids{"BOARD"};
    for (auto& [key, g] : groups) {
        std::string id = g.part.part_id;
        for (int n = 2; used_ids.count(id); ++n) id = g.part.part_id + "-" + std::to_string(n);
        used_ids.insert(id);
        g.part.part_id = id;
        inv.parts.push_back(std::move(g.part));
    }

    Part board;
    board.part_id = "BOARD";
    board.name = layout.board.substrate + " board, " + std::to_string(layout.board.layer_count) + " layers";
    board.category = PartCategory::board();
    board.package_type = layout.board.substrate;
    board.package_area = layout.board.area;
    board.quantity = 1;
    inv.parts.push_back(std::move(board));

    std::sort(inv.parts.begin(), inv.parts.end(),
              [](const Part& a, const Part& b) { return a.part_id < b.part_id; });
    return inv;
}

DesignFormat design_format_from_string(std::string_view s) {
    const std::string u = upper(s);
    if (u == "EAGLE" || u == "BRD" || u == "EAGLEBRD") return DesignFormat::EagleBrd;
    if (u == "JSON" || u == "NEUTRAL" || u == "NEUTRALJSON") return DesignFormat::NeutralJson;
    if (u == "AUTO" || u.empty()) return DesignFormat::Auto;
    throw Error("unknown design format '" + std::string(s) + "'");
}

DesignInventory parse_design(std::string_view bytes, DesignFormat format, const ParseOptions& options,
                             std::string source_file, std::vector<std::string>* warnings) {
    if (format == DesignFormat::Auto) {
        const auto first = std::find_if(bytes.begin(), bytes.end(),
                                         [](char ch) { return !std::isspace(static_cast<unsigned char>(ch)); });
        if (first == bytes.end()) throw ParseError("empty design file", 0);
        format = *first == '<' ? DesignFormat::EagleBrd : DesignFormat::NeutralJson;
    }
    if (format == DesignFormat::NeutralJson) {
        DesignInventory inv = inventory_from_json_text(bytes);
        if (inv.source_file.empty()) inv.source_file = source_file;
        return inv;
    }

    std::string design_id = source_file;
    if (auto slash = design_id.find_last_of("/\\"); slash != std::string::npos) design_id.erase(0, slash + 1);
    if (auto dot = design_id.rfind('.'); dot != std::string::npos && dot > 0) design_id.erase(dot);
    if (design_id.empty()) design_id = "design";
    return assemble_inventory(std::move(design_id), std::move(source_file), read_eagle_layout(bytes), options,
                              warnings);
}

}  // namespace delta_lca
