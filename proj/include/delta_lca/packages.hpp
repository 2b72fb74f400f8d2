// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace delta_lca {

/// Maps free-form footprint / catalog package names onto package families
/// ("QFN", "QFP", ...) through an ordered list of case-insensitive regex
/// tokens. First matching rule wins.
class PackageNormalizer {
public:
    struct Rule {
        std::string pattern;
        std::string family;
    };

    PackageNormalizer() = default;
    explicit PackageNormalizer(std::vector<Rule> rules);

    /// Reads `{"rules": [{"pattern": ..., "family": ...}, ...]}`.
    static PackageNormalizer from_json(const nlohmann::json& j);
    static PackageNormalizer load(const std::string& path);

    /// Family of the first matching rule.
    std::optional<std::string> match(std::string_view footprint) const;

    /// Family name; failing that the passive size code; failing that the
    /// leading alphabetic token of the input, uppercased.
    std::string normalize(std::string_view footprint) const;

    /// Imperial passive size code (0201, 0402, 0603, 0805, 1206) embedded in
    /// the name, if any.
    static std::optional<std::string> passive_size_code(std::string_view footprint);

    const std::vector<Rule>& rules() const { return rules_; }

private:
    std::vector<Rule> rules_;
    std::vector<std::regex> compiled_;
};

}  // namespace delta_lca
