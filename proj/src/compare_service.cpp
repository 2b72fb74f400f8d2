// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/compare_service.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <httplib.h>

namespace delta_lca {

using nlohmann::json;
namespace fs = std::filesystem;

struct SessionStore::Session {
    std::string id;
    mutable std::mutex mu;
    DesignInventory a;
    DesignInventory b;
    std::vector<UserRule> rules;
    std::uint64_t next_rule = 1;
    std::vector<std::string> warnings;
    json latest_report;
    json history = json::array();
};

SessionStore::SessionStore(const Engine& engine, fs::path data_dir, std::int64_t time_budget_ms)
    : engine_(engine), data_dir_(std::move(data_dir)), time_budget_ms_(time_budget_ms) {
    if (!data_dir_.empty()) {
        fs::create_directories(data_dir_);
        load_existing();
    }
}

SessionStore::~SessionStore() = default;

ComparisonOutcome SessionStore::run(const Session& s, const std::vector<UserRule>& rules) const {
    return compare_designs(s.a, s.b, rules, DirectionRequest::Auto, engine_.edge_params(), time_budget_ms_);
}

json SessionStore::summary(const Session& s) const {
    json rules = json::array();
    for (const auto& r : s.rules) rules.push_back(r);
    return json{{"session_id", s.id},
                {"inventories", {{"A", s.a}, {"B", s.b}}},
                {"rules", rules},
                {"result", s.latest_report.at("result")},
                {"report", s.latest_report},
                {"history_length", s.history.size()},
                {"warnings", s.warnings}};
}

void SessionStore::persist(const Session& s) const {
    if (data_dir_.empty()) return;
    json rules = json::array();
    for (const auto& r : s.rules) rules.push_back(r);
    json snap{{"session_id", s.id}, {"a", s.a},           {"b", s.b},
              {"rules", rules},     {"next_rule", s.next_rule}, {"warnings", s.warnings},
              {"history", s.history}};
    const fs::path target = data_dir_ / (s.id + ".json");
    const fs::path tmp = data_dir_ / (s.id + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write session snapshot " + tmp.string());
        out << snap.dump(2) << '\n';
    }
    fs::rename(tmp, target);
}

void SessionStore::load_existing() {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(data_dir_)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        json snap;
        try {
            snap = json::parse(read_file(f));
        } catch (const json::exception&) {
            continue;  // not a snapshot
        }
        if (!snap.contains("session_id")) continue;
        auto s = std::make_shared<Session>();
        s->id = snap.at("session_id").get<std::string>();
        s->a = snap.at("a").get<DesignInventory>();
        s->b = snap.at("b").get<DesignInventory>();
        s->rules = rules_from_json(snap.at("rules"));
        s->next_rule = snap.value("next_rule", std::uint64_t{1});
        s->warnings = snap.value("warnings", std::vector<std::string>{});
        s->history = snap.value("history", json::array());
        const auto outcome = run(*s, s->rules);
        s->latest_report = comparison_report(outcome, s->a, s->b, s->rules);
        if (s->id.size() > 1 && s->id[0] == 's') {
            try {
                counter_ = std::max<std::uint64_t>(counter_, std::stoull(s->id.substr(1)));
            } catch (const std::exception&) {
            }
        }
        sessions_[s->id] = std::move(s);
    }
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("no session " + id);
    return it->second;
}

json SessionStore::create_session(const DesignUpload& a, const DesignUpload& b) {
    auto s = std::make_shared<Session>();
    s->a = engine_.prepare(engine_.parse(a.bytes, a.format, a.filename.empty() ? "A" : a.filename, &s->warnings),
                           &s->warnings);
    s->b = engine_.prepare(engine_.parse(b.bytes, b.format, b.filename.empty() ? "B" : b.filename, &s->warnings),
                           &s->warnings);
    const auto outcome = run(*s, s->rules);
    s->latest_report = comparison_report(outcome, s->a, s->b, s->rules);
    s->history.push_back(s->latest_report.at("result"));
    {
        std::lock_guard lock(mu_);
        char buf[32];
        std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(++counter_));
        s->id = buf;
        sessions_[s->id] = s;
    }
    std::lock_guard lock(s->mu);
    persist(*s);
    return summary(*s);
}

json SessionStore::get(const std::string& session_id) const {
    auto s = find(session_id);
    std::lock_guard lock(s->mu);
    json out = summary(*s);
    out["history"] = s->history;
    return out;
}

std::string SessionStore::add_rule(const std::string& session_id, UserRule rule) {
    auto s = find(session_id);
    std::lock_guard lock(s->mu);
    if (rule.rule_id.empty()) rule.rule_id = "r" + std::to_string(s->next_rule);
    for (const auto& r : s->rules) {
        if (r.rule_id == rule.rule_id) throw ValidationError("duplicate rule id " + rule.rule_id);
    }
    // Dry run: rejects selections that do not survive cancellation.
    std::vector<UserRule> trial = s->rules;
    trial.push_back(rule);
    for (const auto& r : trial) validate_rule(r, s->a, s->b);
    (void)compare_designs(s->a, s->b, trial, DirectionRequest::AGeB, EdgeParams{}, 0);
    s->rules = std::move(trial);
    ++s->next_rule;
    persist(*s);
    return rule.rule_id;
}

void SessionStore::delete_rule(const std::string& session_id, const std::string& rule_id) {
    auto s = find(session_id);
    std::lock_guard lock(s->mu);
    auto it = std::find_if(s->rules.begin(), s->rules.end(), [&](const UserRule& r) { return r.rule_id == rule_id; });
    if (it == s->rules.end()) throw NotFound("no rule " + rule_id + " in session " + session_id);
    s->rules.erase(it);
    persist(*s);
}

json SessionStore::update(const std::string& session_id) {
    auto s = find(session_id);
    std::lock_guard lock(s->mu);
    const auto outcome = run(*s, s->rules);
    s->latest_report = comparison_report(outcome, s->a, s->b, s->rules);
    s->history.push_back(s->latest_report.at("result"));
    persist(*s);
    return s->latest_report.at("result");
}

json SessionStore::inventory(const std::string& session_id, Side side) const {
    auto s = find(session_id);
    std::lock_guard lock(s->mu);
    const DesignInventory& inv = side == Side::A ? s->a : s->b;
    json out = inv;
    out["totals"] = total_footprint(inv);
    out["table"] = s->latest_report.at("tables").at(side == Side::A ? "A" : "B");
    return out;
}

std::vector<std::string> SessionStore::session_ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
}

// Maps library exceptions onto HTTP status codes.
template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        send_json(res, 422, {{"error", "parse"}, {"message", e.what()}, {"offset", e.offset()}});
    } catch (const NotFound& e) {
        send_json(res, 404, {{"error", "not_found"}, {"message", e.what()}});
    } catch (const ValidationError& e) {
        send_json(res, 422, {{"error", "validation"}, {"message", e.what()}});
    } catch (const json::exception& e) {
        send_json(res, 400, {{"error", "bad_request"}, {"message", e.what()}});
    } catch (const std::exception& e) {
        send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
}

// "formats" is "eagle,json", "auto" or a JSON object {"a": ..., "b": ...}.
std::pair<DesignFormat, DesignFormat> parse_formats(const std::string& s) {
    if (s.empty()) return {DesignFormat::Auto, DesignFormat::Auto};
    if (s.front() == '{') {
        const json j = json::parse(s);
        return {design_format_from_string(j.value("a", std::string("auto"))),
                design_format_from_string(j.value("b", std::string("auto")))};
    }
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        const auto f = design_format_from_string(s);
        return {f, f};
    }
    return {design_format_from_string(s.substr(0, comma)), design_format_from_string(s.substr(comma + 1))};
}

}  // namespace

HttpService::HttpService(SessionStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;

    srv.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            if (!req.has_file("fileA") || !req.has_file("fileB")) {
                throw ValidationError("multipart fields fileA and fileB are required");
            }
            std::string formats;
            if (req.has_file("formats")) formats = req.get_file_value("formats").content;
            else if (req.has_param("formats")) formats = req.get_param_value("formats");
            const auto [fa, fb] = parse_formats(formats);
            const auto a = req.get_file_value("fileA");
            const auto b = req.get_file_value("fileB");
            send_json(res, 201, store_.create_session({a.content, a.filename, fa}, {b.content, b.filename, fb}));
        });
    });

    srv.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, store_.get(req.matches[1])); });
    });

    srv.Post(R"(/api/sessions/([^/]+)/rules)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            UserRule rule = json::parse(req.body).get<UserRule>();
            send_json(res, 201, {{"rule_id", store_.add_rule(req.matches[1], std::move(rule))}});
        });
    });

    srv.Delete(R"(/api/sessions/([^/]+)/rules/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            store_.delete_rule(req.matches[1], req.matches[2]);
            send_json(res, 200, {{"deleted", std::string(req.matches[2])}});
        });
    });

    srv.Post(R"(/api/sessions/([^/]+)/update)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, store_.update(req.matches[1])); });
    });

    srv.Get(R"(/api/sessions/([^/]+)/inventory/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string side = req.matches[2];
            if (side != "A" && side != "B" && side != "a" && side != "b") throw NotFound("side must be A or B");
            send_json(res, 200, store_.inventory(req.matches[1], side == "A" || side == "a" ? Side::A : Side::B));
        });
    });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

void HttpService::listen() { server_->listen_after_bind(); }

void HttpService::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

}  // namespace delta_lca
