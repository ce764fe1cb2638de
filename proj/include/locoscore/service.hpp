#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "locoscore/rdb.hpp"
#include "locoscore/scoring.hpp"

namespace locoscore {

nlohmann::json registry_json(const MetricRegistry& registry);
nlohmann::json rdb_summary(const RawDatabase& rdb);

/// Turns a recompute request into a weight configuration. The body is either a weight
/// configuration document, or `{"weights": {...}}` optionally alongside `technique_subset`,
/// `alpha` and `direction_overrides`, which take precedence over the same keys in `weights`.
WeightConfig parse_recompute_request(const nlohmann::json& body,
                                     const MetricRegistry& registry = builtin_registry());

struct HttpResponse {
    int status = 200;
    std::string body;
};

/// Request handling over an immutable RDB. Every call is independent and thread-safe.
class Service {
public:
    explicit Service(RawDatabase rdb, const MetricRegistry& registry = builtin_registry());

    HttpResponse get_registry() const;
    HttpResponse get_summary() const;
    /// 200 with the WDB document, 400 with {"errors": [...]} for a bad request,
    /// 422 when fewer than two techniques would be compared.
    HttpResponse post_wdb(const std::string& body) const;

    const RawDatabase& rdb() const { return rdb_; }

private:
    RawDatabase rdb_;
    const MetricRegistry& registry_;
};

/// HTTP front end: GET /api/registry, GET /api/rdb/summary, POST /api/wdb.
class HttpServer {
public:
    explicit HttpServer(const Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to `host:port` (port 0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace locoscore
