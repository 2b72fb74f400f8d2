// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/catalog.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>

#include "delta_lca/fuzzy.hpp"

namespace delta_lca {

using nlohmann::json;

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

std::string url_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            const std::string hex(s.substr(i + 1, 2));
            out += static_cast<char>(std::strtol(hex.c_str(), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

std::vector<CatalogRecord> records_from(const json& j, CatalogSource source) {
    std::vector<CatalogRecord> out;
    auto one = [&](const json& r) {
        CatalogRecord rec = r.get<CatalogRecord>();
        rec.source = source;
        if (!rec.matched_name.empty()) out.push_back(std::move(rec));
    };
    if (j.is_array()) {
        for (const auto& r : j) one(r);
    } else if (j.is_object()) {
        one(j);
    }
    return out;
}

struct Synonym {
    std::string name;
    std::string key;
};

const std::vector<Synonym>& synonyms() {
    static const std::vector<Synonym> table = {
        {"Supplier Device Package", "supplier_package"},
        {"Device Package", "supplier_package"},
        {"Supplier Package", "supplier_package"},
        {"Number of Pins", "pin_count"},
        {"Pin Count", "pin_count"},
        {"Number of Terminations", "pin_count"},
        {"Program Memory Size", "memory_size"},
        {"Memory Size", "memory_size"},
        {"Flash Size", "memory_size"},
        {"Speed", "max_frequency"},
        {"Max Frequency", "max_frequency"},
        {"Maximum Clock Frequency", "max_frequency"},
        {"Clock Frequency", "max_frequency"},
        {"Core Processor", "core_architecture"},
        {"Core Architecture", "core_architecture"},
        {"Processor Core", "core_architecture"},
        {"Active Current per MHz", "active_current_per_mhz"},
        {"Supply Current per MHz", "active_current_per_mhz"},
        {"Unit Weight", "mass"},
        {"Weight", "mass"},
    };
    return table;
}

struct Quantity {
    double value = 0.0;
    std::string unit;
};

std::optional<Quantity> leading_quantity(const std::string& text) {
    static const std::regex re(R"(([0-9]*\.?[0-9]+)\s*([A-Za-z\xC2\xB5/]*))");
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    return Quantity{std::strtod(m[1].str().c_str(), nullptr), m[2].str()};
}

std::optional<double> parse_frequency_mhz(const std::string& text) {
    auto q = leading_quantity(text);
    if (!q) return std::nullopt;
    const std::string u = upper(q->unit);
    if (u.rfind("GHZ", 0) == 0) return q->value * 1000.0;
    if (u.rfind("MHZ", 0) == 0 || u.empty()) return q->value;
    if (u.rfind("KHZ", 0) == 0) return q->value / 1000.0;
    if (u.rfind("HZ", 0) == 0) return q->value / 1e6;
    return std::nullopt;
}

std::optional<double> parse_memory_kb(const std::string& text) {
    auto q = leading_quantity(text);
    if (!q) return std::nullopt;
    const std::string u = upper(q->unit);
    if (u == "KB" || u == "K" || u == "KBYTE" || u == "KBYTES" || u.empty()) return q->value;
    if (u == "MB" || u == "M") return q->value * 1024.0;
    if (u == "GB") return q->value * 1024.0 * 1024.0;
    if (u == "B" || u == "BYTES") return q->value / 1024.0;
    return std::nullopt;
}

std::optional<double> parse_current_ma_per_mhz(const std::string& text) {
    auto q = leading_quantity(text);
    if (!q) return std::nullopt;
    std::string u = upper(q->unit);
    if (auto slash = u.find('/'); slash != std::string::npos) u.erase(slash);
    if (u == "MA" || u.empty()) return q->value;
    if (u == "UA" || u == "\xC2\xB5" "A") return q->value / 1000.0;
    if (u == "A") return q->value * 1000.0;
    return std::nullopt;
}

std::optional<double> parse_mass_g(const std::string& text) {
    auto q = leading_quantity(text);
    if (!q) return std::nullopt;
    const std::string u = upper(q->unit);
    if (u == "G" || u.empty()) return q->value;
    if (u == "MG") return q->value / 1000.0;
    if (u == "KG") return q->value * 1000.0;
    return std::nullopt;
}

std::optional<std::int64_t> parse_count(const std::string& text) {
    static const std::regex re(R"(^\s*([0-9]+)\s*$)");
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    return std::strtoll(m[1].str().c_str(), nullptr, 10);
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace

void to_json(json& j, const CatalogRecord& r) {
    j = json{{"matched_name", r.matched_name},
             {"attributes", r.attributes},
             {"source", r.source == CatalogSource::LiveHttp ? "live_http" : "offline_fixture"}};
}

void from_json(const json& j, CatalogRecord& r) {
    r.matched_name = j.contains("matched_name") ? j.at("matched_name").get<std::string>()
                                                : j.value("name", std::string{});
    r.attributes.clear();
    if (auto it = j.find("attributes"); it != j.end() && it->is_object()) {
        for (const auto& [k, v] : it->items()) r.attributes[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    r.source = j.value("source", std::string{}) == "live_http" ? CatalogSource::LiveHttp : CatalogSource::OfflineFixture;
}

std::string url_safe(std::string_view name) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char ch : name) {
        if (std::isalnum(ch) || ch == '.' || ch == '_' || ch == '-') {
            out += static_cast<char>(ch);
        } else {
            out += '%';
            out += hex[ch >> 4];
            out += hex[ch & 0xF];
        }
    }
    return out;
}

FixtureCatalog::FixtureCatalog(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_)) {
        throw ConfigError("catalog fixture directory not found: " + dir_.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.path().extension() != ".json") continue;
        index_[upper(url_safe(url_decode(entry.path().stem().string())))] = entry.path();
    }
}

std::vector<CatalogRecord> FixtureCatalog::search(std::string_view query) const {
    auto it = index_.find(upper(url_safe(query)));
    if (it == index_.end()) return {};
    std::ifstream in(it->second);
    try {
        return records_from(json::parse(in), CatalogSource::OfflineFixture);
    } catch (const json::exception& e) {
        throw ConfigError("bad catalog fixture " + it->second.string() + ": " + e.what());
    }
}

HttpCatalog::HttpCatalog(ProviderConfig config) : config_(std::move(config)) {
    if (config_.timeout_ms <= 0) throw ConfigError("catalog timeout must be > 0");
    if (config_.base_url.empty()) throw ConfigError("catalog base_url is empty");
}

std::vector<CatalogRecord> HttpCatalog::search(std::string_view query) const {
    // Split "scheme://host:port/prefix" into client origin and path prefix.
    std::string origin = config_.base_url;
    std::string prefix;
    if (auto scheme = origin.find("://"); scheme != std::string::npos) {
        if (auto slash = origin.find('/', scheme + 3); slash != std::string::npos) {
            prefix = origin.substr(slash);
            origin.erase(slash);
        }
    }
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(origin);
    const auto secs = config_.timeout_ms / 1000;
    const auto usecs = (config_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    httplib::Headers headers;
    if (!config_.credentials_env.empty()) {
        if (const char* token = std::getenv(config_.credentials_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }
    const std::string path = prefix + "/search?q=" + url_safe(query);

    std::string last_error;
    for (int attempt = 0; attempt <= std::max(config_.retry_budget, 0); ++attempt) {
        auto res = client.Get(path, headers);
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 404) return {};
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw CatalogUnavailable("catalog returned HTTP " + std::to_string(res->status));
        try {
            return records_from(json::parse(res->body), CatalogSource::LiveHttp);
        } catch (const json::exception& e) {
            throw CatalogUnavailable(std::string("catalog returned malformed JSON: ") + e.what());
        }
    }
    throw CatalogUnavailable("catalog unreachable at " + config_.base_url + ": " + last_error);
}

std::vector<std::string> fuzzy_queries(std::string_view part_name) {
    std::vector<std::string> out{std::string(part_name)};
    std::string current(part_name);
    for (int i = 0; i < 3; ++i) {
        auto cut = std::find_if(current.rbegin(), current.rend(),
                                [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)); });
        if (cut == current.rend()) break;
        current.erase(static_cast<std::size_t>(current.rend() - cut) - 1);
        while (!current.empty() && !std::isalnum(static_cast<unsigned char>(current.back()))) current.pop_back();
        if (current.empty()) break;
        out.push_back(current);
    }
    return out;
}

std::optional<CatalogRecord> lookup(std::string_view part_name, const CatalogProvider& provider) {
    if (part_name.empty()) return std::nullopt;
    for (const auto& q : fuzzy_queries(part_name)) {
        auto records = provider.search(q);
        if (!records.empty()) return records.front();
    }
    return std::nullopt;
}

MappedAttributes map_attributes(const CatalogRecord& record, const PackageNormalizer& normalizer) {
    MappedAttributes out;
    const auto& table = synonyms();
    std::vector<std::string> names;
    names.reserve(table.size());
    for (const auto& s : table) names.push_back(s.name);

    struct Pick {
        std::string catalog_name;
        std::string value;
        double score;
    };
    std::map<std::string, Pick> chosen;
    for (const auto& [name, value] : record.attributes) {
        auto m = fuzzy::best_match(name, names);
        if (!m) continue;
        const std::string& key = table[m->index].key;
        auto it = chosen.find(key);
        if (it == chosen.end()) {
            chosen.emplace(key, Pick{name, value, m->score});
        } else if (m->score > it->second.score) {
            out.warnings.push_back("attribute '" + it->second.catalog_name + "' dropped: '" + name +
                                   "' maps to " + key + " more closely");
            it->second = Pick{name, value, m->score};
        } else {
            out.warnings.push_back("attribute '" + name + "' dropped: " + key + " already mapped from '" +
                                   it->second.catalog_name + "'");
        }
    }

    auto skip = [&](const Pick& p) {
        out.warnings.push_back("cannot parse '" + p.catalog_name + "' value '" + p.value + "'");
    };
    for (const auto& [key, pick] : chosen) {
        const std::string v = trim(pick.value);
        bool ok = true;
        if (key == "supplier_package") {
            static const std::regex pins(R"(^\s*([0-9]+)\s*-)");
            static const std::regex dims(R"(([0-9]*\.?[0-9]+)\s*[xX]\s*([0-9]*\.?[0-9]+))");
            std::smatch m;
            if (std::regex_search(v, m, pins)) out.pin_hint = std::strtoll(m[1].str().c_str(), nullptr, 10);
            if (std::regex_search(v, m, dims)) {
                out.package_dims = std::pair{std::strtod(m[1].str().c_str(), nullptr),
                                             std::strtod(m[2].str().c_str(), nullptr)};
            }
            const std::string family = normalizer.normalize(v);
            ok = !family.empty();
            if (ok) out.package_type = family;
        } else if (key == "pin_count") {
            auto n = parse_count(v);
            ok = n.has_value();
            if (ok) out.attributes.pin_count = *n;
        } else if (key == "memory_size") {
            auto kb = parse_memory_kb(v);
            ok = kb.has_value();
            if (ok) out.attributes.memory_size = *kb;
        } else if (key == "max_frequency") {
            auto mhz = parse_frequency_mhz(v);
            ok = mhz.has_value();
            if (ok) out.attributes.max_frequency = *mhz;
        } else if (key == "core_architecture") {
            ok = !v.empty();
            if (ok) out.attributes.core_architecture = v;
        } else if (key == "active_current_per_mhz") {
            auto ma = parse_current_ma_per_mhz(v);
            ok = ma.has_value();
            if (ok) out.attributes.active_current_per_mhz = *ma;
        } else if (key == "mass") {
            auto g = parse_mass_g(v);
            ok = g.has_value();
            if (ok) out.attributes.mass = *g;
        }
        if (ok) {
            out.mapping[pick.catalog_name] = key;
        } else {
            skip(pick);
        }
    }
    return out;
}

}  // namespace delta_lca
