// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delta_lca/error.hpp"
#include "delta_lca/inventory.hpp"
#include "delta_lca/packages.hpp"

namespace delta_lca {

enum class CatalogSource { OfflineFixture, LiveHttp };

struct CatalogRecord {
    std::string matched_name;
    std::map<std::string, std::string> attributes;  // raw catalog names -> values
    CatalogSource source = CatalogSource::OfflineFixture;

    bool operator==(const CatalogRecord&) const = default;
};

struct ProviderConfig {
    std::string base_url;
    std::string credentials_env;  // name of the environment variable holding the token
    int timeout_ms = 5000;
    int retry_budget = 2;
};

/// Transport failure talking to a live provider. Distinct from "not found".
class CatalogUnavailable : public Error {
public:
    using Error::Error;
};

class CatalogProvider {
public:
    virtual ~CatalogProvider() = default;
    /// Records for a keyword query, best match first. Empty when nothing matches.
    virtual std::vector<CatalogRecord> search(std::string_view query) const = 0;
    virtual CatalogSource source() const = 0;
};

/// Reads one JSON file per part name from a directory; never touches the network.
class FixtureCatalog final : public CatalogProvider {
public:
    explicit FixtureCatalog(std::filesystem::path dir);
    std::vector<CatalogRecord> search(std::string_view query) const override;
    CatalogSource source() const override { return CatalogSource::OfflineFixture; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::filesystem::path> index_;  // uppercased url-safe stem -> file
};

/// GET {base_url}/search?q=... returning a JSON list of
/// `{"matched_name": ..., "attributes": {...}}` records.
class HttpCatalog final : public CatalogProvider {
public:
    explicit HttpCatalog(ProviderConfig config);
    std::vector<CatalogRecord> search(std::string_view query) const override;
    CatalogSource source() const override { return CatalogSource::LiveHttp; }

private:
    ProviderConfig config_;
};

/// Percent-encodes everything outside [A-Za-z0-9._-].
std::string url_safe(std::string_view name);

/// The query itself followed by up to three progressively suffix-stripped
/// variants, each cut at the last non-alphanumeric character.
std::vector<std::string> fuzzy_queries(std::string_view part_name);

/// First nonempty top match over `fuzzy_queries`. Throws CatalogUnavailable
/// when the provider cannot be reached.
std::optional<CatalogRecord> lookup(std::string_view part_name, const CatalogProvider& provider);

struct MappedAttributes {
    PartAttributes attributes;
    std::optional<std::string> package_type;
    std::optional<std::int64_t> pin_hint;
    std::optional<std::pair<double, double>> package_dims;  // mm, from "(7x7)"-style suffixes
    std::map<std::string, std::string> mapping;              // catalog name -> canonical key
    std::vector<std::string> warnings;
};

/// Maps raw catalog attribute names onto canonical keys by fuzzy similarity
/// against a synonym table; at most one catalog name per canonical key.
MappedAttributes map_attributes(const CatalogRecord& record, const PackageNormalizer& normalizer);

void to_json(nlohmann::json& j, const CatalogRecord& r);
void from_json(const nlohmann::json& j, CatalogRecord& r);

}  // namespace delta_lca
