// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/packages.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "delta_lca/error.hpp"

namespace delta_lca {

PackageNormalizer::PackageNormalizer(std::vector<Rule> rules) : rules_(std::move(rules)) {
    compiled_.reserve(rules_.size());
    for (const auto& r : rules_) {
        try {
            compiled_.emplace_back(r.pattern, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw ConfigError("bad package pattern '" + r.pattern + "': " + e.what());
        }
    }
}

PackageNormalizer PackageNormalizer::from_json(const nlohmann::json& j) {
    std::vector<Rule> rules;
    for (const auto& r : j.at("rules")) {
        rules.push_back({r.at("pattern").get<std::string>(), r.at("family").get<std::string>()});
    }
    return PackageNormalizer(std::move(rules));
}

PackageNormalizer PackageNormalizer::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open package alias table " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad package alias table " + path + ": " + e.what());
    }
}

std::optional<std::string> PackageNormalizer::match(std::string_view footprint) const {
    const std::string text(footprint);
    for (std::size_t i = 0; i < compiled_.size(); ++i) {
        if (std::regex_search(text, compiled_[i])) return rules_[i].family;
    }
    return std::nullopt;
}

std::string PackageNormalizer::normalize(std::string_view footprint) const {
    if (auto family = match(footprint)) return *family;
    if (auto code = passive_size_code(footprint)) return *code;
    const std::string text(footprint);
    std::string token;
    for (unsigned char ch : text) {
        if (std::isalpha(ch)) {
            token += static_cast<char>(std::toupper(ch));
        } else if (!token.empty()) {
            break;
        }
    }
    return token;
}

std::optional<std::string> PackageNormalizer::passive_size_code(std::string_view footprint) {
    static const std::regex code(R"((?:^|[^0-9])(0201|0402|0603|0805|1206)(?:[^0-9]|$))");
    std::smatch m;
    const std::string text(footprint);
    if (std::regex_search(text, m, code)) return m[1].str();
    return std::nullopt;
}

}  // namespace delta_lca
