// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "../support/fixtures.hpp"
#include "delta_lca/cli.hpp"
#include "delta_lca/compare_service.hpp"

using namespace delta_lca;
using nlohmann::json;
using delta_lca::testing::fixture_path;
using delta_lca::testing::offline_engine;

namespace fs = std::filesystem;

namespace {

DesignUpload upload(const std::string& rel) { return {read_file(fixture_path(rel)), rel, DesignFormat::Auto}; }

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("delta_lca_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

UserRule example_rule() {
    auto rules = rules_from_json(json::parse(read_file(fixture_path("rules/rules_example.json"))));
    rules.at(0).rule_id.clear();
    return rules.at(0);
}

}  // namespace

TEST(SessionStore, CreateAndGet) {
    SessionStore store(offline_engine(), {});
    const json s = store.create_session(upload("designs/base.json"), upload("designs/base.json"));
    const std::string id = s.at("session_id");
    EXPECT_EQ(s.at("result").at("verdict"), "proven");
    const json g = store.get(id);
    EXPECT_EQ(g.at("session_id"), id);
    EXPECT_EQ(g.at("history").size(), 1u);
    EXPECT_THROW(store.get("s999999"), NotFound);
}

TEST(SessionStore, RuleLifecycle) {
    SessionStore store(offline_engine(), {});
    const std::string id = store.create_session(upload("designs/rules_a.json"), upload("designs/rules_b.json"))
                               .at("session_id");
    EXPECT_EQ(store.update(id).at("verdict"), "inconclusive");
    const json before = store.update(id);

    const std::string rid = store.add_rule(id, example_rule());
    EXPECT_EQ(rid, "r1");
    EXPECT_EQ(store.update(id).at("verdict"), "proven");

    store.delete_rule(id, rid);
    EXPECT_EQ(store.update(id).dump(), before.dump());
    EXPECT_THROW(store.delete_rule(id, rid), NotFound);
    EXPECT_EQ(store.get(id).at("history").size(), 5u);
}

TEST(SessionStore, RejectsBadRules) {
    SessionStore store(offline_engine(), {});
    const std::string id = store.create_session(upload("designs/rules_a.json"), upload("designs/rules_b.json"))
                               .at("session_id");
    UserRule r = example_rule();
    r.a_selection[0].quantity = 99;
    EXPECT_THROW(store.add_rule(id, r), ValidationError);
    r = example_rule();
    r.a_selection[0].part_id = "CAPACITOR-0402";  // fully cancelled against B
    EXPECT_THROW(store.add_rule(id, r), ValidationError);
    r = example_rule();
    r.rule_id = "mine";
    EXPECT_EQ(store.add_rule(id, r), "mine");
    EXPECT_THROW(store.add_rule(id, r), ValidationError);  // duplicate id
    EXPECT_THROW(store.add_rule("nope", example_rule()), NotFound);
}

TEST(SessionStore, UpdateIsIdempotent) {
    SessionStore store(offline_engine(), {});
    const std::string id = store.create_session(upload("boards/leonardo_like.brd"), upload("boards/mkr_fox_like.brd"))
                               .at("session_id");
    const std::string first = store.update(id).dump();
    for (int i = 0; i < 3; ++i) EXPECT_EQ(store.update(id).dump(), first);
}

TEST(SessionStore, SessionsAreIsolated) {
    SessionStore store(offline_engine(), {});
    const std::string s1 = store.create_session(upload("designs/rules_a.json"), upload("designs/rules_b.json"))
                               .at("session_id");
    const std::string s2 = store.create_session(upload("designs/rules_a.json"), upload("designs/rules_b.json"))
                               .at("session_id");
    EXPECT_NE(s1, s2);
    store.add_rule(s1, example_rule());
    EXPECT_EQ(store.update(s1).at("verdict"), "proven");
    EXPECT_EQ(store.update(s2).at("verdict"), "inconclusive");
    EXPECT_TRUE(store.get(s2).at("rules").empty());
}

TEST(SessionStore, InventoryView) {
    SessionStore store(offline_engine(), {});
    const std::string id = store.create_session(upload("designs/base.json"), upload("designs/base_plus_ic.json"))
                               .at("session_id");
    const json inv = store.inventory(id, Side::B);
    EXPECT_EQ(inv.at("design_id"), "base_plus_ic");
    EXPECT_TRUE(inv.contains("totals"));
    EXPECT_EQ(inv.at("table").size(), 18u);
    EXPECT_THROW(store.inventory("missing", Side::A), NotFound);
}

TEST(SessionStore, PersistsAndReloads) {
    const fs::path dir = scratch_dir("persist");
    std::string id, result;
    {
        SessionStore store(offline_engine(), dir);
        id = store.create_session(upload("designs/rules_a.json"), upload("designs/rules_b.json")).at("session_id");
        store.add_rule(id, example_rule());
        result = store.update(id).dump();
    }
    EXPECT_TRUE(fs::exists(dir / (id + ".json")));
    SessionStore reloaded(offline_engine(), dir);
    ASSERT_EQ(reloaded.session_ids(), std::vector<std::string>{id});
    EXPECT_EQ(reloaded.get(id).at("result").dump(), result);
    EXPECT_EQ(reloaded.get(id).at("rules").size(), 1u);
    // New ids continue after the reloaded ones.
    const std::string next = reloaded.create_session(upload("designs/base.json"), upload("designs/base.json"))
                                 .at("session_id");
    EXPECT_GT(next, id);
    fs::remove_all(dir);
}

TEST(SessionStore, ParseErrorsSurface) {
    SessionStore store(offline_engine(), {});
    DesignUpload bad{"<eagle><drawing><board>", "bad.brd", DesignFormat::EagleBrd};
    EXPECT_THROW(store.create_session(bad, upload("designs/base.json")), ParseError);
    EXPECT_TRUE(store.session_ids().empty());
}

TEST(SessionStore, ResultMatchesCliOutput) {
    SessionStore store(offline_engine(), {});
    const json s = store.create_session(upload("boards/uno_wifi_like.brd"), upload("boards/leonardo_like.brd"));
    std::ostringstream out, err;
    const int code = cli::run({"compare", "--offline", fixture_path("boards/uno_wifi_like.brd"),
                               fixture_path("boards/leonardo_like.brd")},
                              out, err);
    EXPECT_EQ(code, cli::kExitOk);
    EXPECT_EQ(out.str(), s.at("result").dump(2) + "\n");
}

class HttpFixture : public ::testing::Test {
protected:
    void SetUp() override {
        port_ = service_.bind("127.0.0.1", 0);
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { service_.listen(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        for (int i = 0; i < 100 && !client_->Get("/api/sessions/ping"); ++i)
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    void TearDown() override {
        service_.stop();
        thread_.join();
    }

    httplib::Result create(const std::string& a_bytes, const std::string& b_bytes, const std::string& formats = "") {
        httplib::MultipartFormDataItems items = {{"fileA", a_bytes, "a.brd", "application/octet-stream"},
                                                 {"fileB", b_bytes, "b.brd", "application/octet-stream"}};
        if (!formats.empty()) items.push_back({"formats", formats, "", ""});
        return client_->Post("/api/sessions", items);
    }

    SessionStore store_{offline_engine(), {}};
    HttpService service_{store_};
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpFixture, SessionRoundTrip) {
    const std::string a = read_file(fixture_path("designs/rules_a.json"));
    const std::string b = read_file(fixture_path("designs/rules_b.json"));
    auto res = create(a, b, "json,json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 201) << res->body;
    const std::string id = json::parse(res->body).at("session_id");

    res = client_->Get("/api/sessions/" + id);
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body).at("result").at("verdict"), "inconclusive");

    const json rule = json::parse(read_file(fixture_path("rules/rules_example.json"))).at("rules").at(0);
    res = client_->Post("/api/sessions/" + id + "/rules", rule.dump(), "application/json");
    ASSERT_EQ(res->status, 201) << res->body;
    const std::string rid = json::parse(res->body).at("rule_id");

    res = client_->Post("/api/sessions/" + id + "/update", "", "application/json");
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body).at("verdict"), "proven");

    res = client_->Delete("/api/sessions/" + id + "/rules/" + rid);
    EXPECT_EQ(res->status, 200);
    res = client_->Delete("/api/sessions/" + id + "/rules/" + rid);
    EXPECT_EQ(res->status, 404);

    res = client_->Get("/api/sessions/" + id + "/inventory/A");
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body).at("design_id"), "rules_a");
    EXPECT_EQ(client_->Get("/api/sessions/" + id + "/inventory/C")->status, 404);
}

TEST_F(HttpFixture, Errors) {
    const std::string good = read_file(fixture_path("designs/base.json"));
    auto res = create("<eagle><drawing>", good, "eagle,json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 422);
    const json body = json::parse(res->body);
    EXPECT_EQ(body.at("error"), "parse");
    EXPECT_TRUE(body.at("offset").is_number());

    EXPECT_EQ(client_->Get("/api/sessions/s424242")->status, 404);
    EXPECT_EQ(client_->Post("/api/sessions/s424242/update", "", "application/json")->status, 404);

    httplib::MultipartFormDataItems only_a = {{"fileA", good, "a.json", "application/json"}};
    EXPECT_EQ(client_->Post("/api/sessions", only_a)->status, 422);

    res = create(good, good, "json,json");
    const std::string id = json::parse(res->body).at("session_id");
    EXPECT_EQ(client_->Post("/api/sessions/" + id + "/rules", "{not json", "application/json")->status, 400);
    const json bad_rule = {{"a", {{{"part_id", "MCU"}, {"quantity", 1}}}}, {"b", {{{"part_id", "MCU"}}}}};
    EXPECT_EQ(client_->Post("/api/sessions/" + id + "/rules", bad_rule.dump(), "application/json")->status, 422);
}

TEST(SessionStore, MatchedCountMonotoneAcrossRuleAdds) {
    SessionStore store(offline_engine(), {});
    const std::string id = store.create_session(upload("designs/disjoint_a.json"), upload("designs/disjoint_b.json"))
                               .at("session_id");
    std::int64_t previous = store.update(id).at("objective");
    const std::pair<const char*, const char*> picks[] = {{"SENSOR", "BUZZER"}, {"ANT", "RELAY"}, {"BOARD", "RELAY"}};
    for (const auto& [a, b] : picks) {
        store.add_rule(id, UserRule{"", {{a, 1}}, {{b, 1}}, Comparator::AGreaterOrEqual, ""});
        const std::int64_t now = store.update(id).at("objective");
        EXPECT_GE(now, previous) << a << " vs " << b;
        previous = now;
    }
    EXPECT_EQ(store.get(id).at("rules").size(), 3u);
}
