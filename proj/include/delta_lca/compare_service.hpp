// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delta_lca/error.hpp"
#include "delta_lca/pipeline.hpp"

namespace httplib {
class Server;
}

namespace delta_lca {

class NotFound : public Error {
public:
    using Error::Error;
};

struct DesignUpload {
    std::string bytes;
    std::string filename;
    DesignFormat format = DesignFormat::Auto;
};

/// Comparison sessions with JSON snapshots on disk. Requests on one session
/// are serialized; distinct sessions run concurrently.
class SessionStore {
public:
    /// `data_dir` empty keeps sessions in memory only.
    SessionStore(const Engine& engine, std::filesystem::path data_dir, std::int64_t time_budget_ms = 10000);
    ~SessionStore();

    /// Parses, prepares and compares both designs. Throws ParseError for an
    /// unreadable file.
    nlohmann::json create_session(const DesignUpload& a, const DesignUpload& b);

    nlohmann::json get(const std::string& session_id) const;

    /// Validates the rule against the session and stores it; returns its id.
    std::string add_rule(const std::string& session_id, UserRule rule);
    void delete_rule(const std::string& session_id, const std::string& rule_id);

    /// Re-runs the comparison with the current rules and returns the MatchResult JSON.
    nlohmann::json update(const std::string& session_id);

    nlohmann::json inventory(const std::string& session_id, Side side) const;

    std::vector<std::string> session_ids() const;

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id) const;
    nlohmann::json summary(const Session& s) const;
    ComparisonOutcome run(const Session& s, const std::vector<UserRule>& rules) const;
    void persist(const Session& s) const;
    void load_existing();

    const Engine& engine_;
    std::filesystem::path data_dir_;
    std::int64_t time_budget_ms_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t counter_ = 0;
};

/// HTTP+JSON front end over a SessionStore.
class HttpService {
public:
    explicit HttpService(SessionStore& store);
    ~HttpService();

    /// Binds and returns the port (an ephemeral one when `port` is 0).
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

private:
    SessionStore& store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace delta_lca
