// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "delta_lca/catalog.hpp"

using namespace delta_lca;

namespace {

PackageNormalizer normalizer() { return PackageNormalizer::load(DELTA_LCA_DATA_DIR "/package_aliases.json"); }

FixtureCatalog fixtures() { return FixtureCatalog(DELTA_LCA_FIXTURE_DIR "/catalog"); }

// Local HTTP catalog stub on an ephemeral port.
class StubServer {
public:
    StubServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& server() { return server_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

ProviderConfig config(const std::string& url) {
    ProviderConfig c;
    c.base_url = url;
    c.timeout_ms = 2000;
    c.retry_budget = 2;
    return c;
}

}  // namespace

TEST(Queries, SuffixStripping) {
    EXPECT_EQ(fuzzy_queries("ATMEGA32U4-AU"), (std::vector<std::string>{"ATMEGA32U4-AU", "ATMEGA32U4"}));
    EXPECT_EQ(fuzzy_queries("A-B-C-D-E"), (std::vector<std::string>{"A-B-C-D-E", "A-B-C-D", "A-B-C", "A-B"}));
    EXPECT_EQ(fuzzy_queries("PLAIN"), std::vector<std::string>{"PLAIN"});
}

TEST(Queries, UrlSafe) {
    EXPECT_EQ(url_safe("ATMEGA32U4-AU"), "ATMEGA32U4-AU");
    EXPECT_EQ(url_safe("A/B C"), "A%2FB%20C");
}

TEST(Fixture, ResolvesOrderingCode) {
    const auto cat = fixtures();
    const auto r = lookup("ATMEGA32U4-AU", cat);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->matched_name, "ATMEGA32U4");
    EXPECT_EQ(r->source, CatalogSource::OfflineFixture);
    EXPECT_FALSE(lookup("NO-SUCH-PART-XYZ", cat));
    EXPECT_FALSE(lookup("", cat));
}

TEST(Fixture, Deterministic) {
    const auto cat = fixtures();
    for (const char* q : {"ATMEGA32U4-AU", "ATSAMD21G18A-AU", "ESP32-D0WD"}) {
        EXPECT_EQ(lookup(q, cat), lookup(q, cat)) << q;
    }
}

TEST(Fixture, MissingDirectory) { EXPECT_THROW(FixtureCatalog("/nonexistent/catalog"), ConfigError); }

TEST(Mapping, BundledRecord) {
    const auto r = lookup("ATMEGA32U4-AU", fixtures());
    ASSERT_TRUE(r);
    const auto m = map_attributes(*r, normalizer());
    EXPECT_EQ(m.attributes.pin_count, 44);
    EXPECT_DOUBLE_EQ(m.attributes.max_frequency.value(), 16.0);
    EXPECT_DOUBLE_EQ(m.attributes.memory_size.value(), 32.0);
    EXPECT_DOUBLE_EQ(m.attributes.active_current_per_mhz.value(), 0.60);
    EXPECT_EQ(m.attributes.core_architecture, "AVR");
    EXPECT_EQ(m.package_type, "QFP");
    EXPECT_EQ(m.pin_hint, 44);
    ASSERT_TRUE(m.package_dims);
    EXPECT_DOUBLE_EQ(m.package_dims->first, 10.0);
    EXPECT_TRUE(m.warnings.empty());
}

TEST(Mapping, UnitsAndSynonyms) {
    CatalogRecord r;
    r.attributes = {{"Max Frequency", "1.2GHz"},
                    {"Flash Size", "2MB"},
                    {"Unit Weight", "150 mg"},
                    {"Supply Current per MHz", "70 uA/MHz"},
                    {"Pin Count", "48"}};
    const auto m = map_attributes(r, normalizer());
    EXPECT_DOUBLE_EQ(m.attributes.max_frequency.value(), 1200.0);
    EXPECT_DOUBLE_EQ(m.attributes.memory_size.value(), 2048.0);
    EXPECT_DOUBLE_EQ(m.attributes.mass.value(), 0.15);
    EXPECT_DOUBLE_EQ(m.attributes.active_current_per_mhz.value(), 0.07);
    EXPECT_EQ(m.attributes.pin_count, 48);
}

TEST(Mapping, InjectiveOntoCanonicalKeys) {
    CatalogRecord r;
    r.attributes = {{"Speed", "16MHz"}, {"Max Frequency", "20MHz"}, {"Clock Frequency", "8MHz"}};
    const auto m = map_attributes(r, normalizer());
    std::set<std::string> keys;
    for (const auto& [name, key] : m.mapping) EXPECT_TRUE(keys.insert(key).second) << key;
    EXPECT_EQ(m.mapping.size(), 1u);
    EXPECT_EQ(m.warnings.size(), 2u);
}

TEST(Mapping, UnparseableValuesWarn) {
    CatalogRecord r;
    r.attributes = {{"Number of Pins", "many"}, {"Speed", "fast"}, {"Colour", "green"}};
    const auto m = map_attributes(r, normalizer());
    EXPECT_FALSE(m.attributes.pin_count);
    EXPECT_FALSE(m.attributes.max_frequency);
    EXPECT_EQ(m.warnings.size(), 2u);
    EXPECT_TRUE(m.mapping.empty());
}

TEST(Http, FoundRecordAndQueryEncoding) {
    StubServer stub;
    std::string seen_query, seen_auth;
    stub.server().Get("/api/search", [&](const httplib::Request& req, httplib::Response& res) {
        seen_query = req.get_param_value("q");
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"([{"matched_name": "ATMEGA32U4", "attributes": {"Speed": "16MHz"}}])", "application/json");
    });
    ::setenv("DELTA_LCA_TEST_TOKEN", "secret", 1);
    auto c = config(stub.url() + "/api");
    c.credentials_env = "DELTA_LCA_TEST_TOKEN";
    HttpCatalog cat(c);
    const auto r = cat.search("ATMEGA32U4 AU");
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].matched_name, "ATMEGA32U4");
    EXPECT_EQ(r[0].source, CatalogSource::LiveHttp);
    EXPECT_EQ(seen_query, "ATMEGA32U4 AU");
    EXPECT_EQ(seen_auth, "Bearer secret");
}

TEST(Http, NotFoundIsEmpty) {
    StubServer stub;
    stub.server().Get("/search", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    HttpCatalog cat(config(stub.url()));
    EXPECT_TRUE(cat.search("X").empty());
    EXPECT_FALSE(lookup("X-Y", cat));
}

TEST(Http, ServerErrorsAreRetried) {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server().Get("/search", [&](const httplib::Request&, httplib::Response& res) {
        if (++calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content("[]", "application/json");
    });
    HttpCatalog cat(config(stub.url()));
    EXPECT_TRUE(cat.search("X").empty());
    EXPECT_EQ(calls.load(), 3);
}

TEST(Http, PersistentServerErrorIsUnavailable) {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server().Get("/search", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
    });
    HttpCatalog cat(config(stub.url()));
    EXPECT_THROW(cat.search("X"), CatalogUnavailable);
    EXPECT_EQ(calls.load(), 3);
}

TEST(Http, MalformedBodyIsUnavailable) {
    StubServer stub;
    stub.server().Get("/search", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("not json", "application/json");
    });
    HttpCatalog cat(config(stub.url()));
    EXPECT_THROW(cat.search("X"), CatalogUnavailable);
}

TEST(Http, UnreachableHost) {
    // Bind then release a port so nothing listens there.
    int port = 0;
    {
        httplib::Server s;
        port = s.bind_to_any_port("127.0.0.1");
    }
    auto c = config("http://127.0.0.1:" + std::to_string(port));
    c.timeout_ms = 300;
    HttpCatalog cat(c);
    EXPECT_THROW(lookup("ATMEGA32U4-AU", cat), CatalogUnavailable);
}

TEST(Http, BadConfig) {
    EXPECT_THROW(HttpCatalog(ProviderConfig{}), ConfigError);
    auto c = config("http://127.0.0.1:1");
    c.timeout_ms = 0;
    EXPECT_THROW(HttpCatalog{c}, ConfigError);
}
