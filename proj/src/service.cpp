#include "locoscore/service.hpp"

#include <set>

#include <httplib.h>

#include "locoscore/error.hpp"

namespace locoscore {

using nlohmann::json;

namespace {

const char* role_name(MetricRole r) {
    switch (r) {
        case MetricRole::Scored: return "scored";
        case MetricRole::Element: return "element";
        case MetricRole::Input: return "input";
    }
    return "?";
}

const char* aggregation_name(Aggregation::Kind k) {
    switch (k) {
        case Aggregation::Kind::Elementary: return "elementary";
        case Aggregation::Kind::Cumulative: return "cumulative";
        case Aggregation::Kind::Compound: return "compound";
    }
    return "?";
}

const char* formula_name(CompoundFormula f) {
    switch (f) {
        case CompoundFormula::None: return "";
        case CompoundFormula::AccuracyBkw: return "AccuracyBkw";
        case CompoundFormula::AccuracyGazeUnc: return "AccuracyGazeUnc";
        case CompoundFormula::AccuracyStrc: return "AccuracyStrc";
        case CompoundFormula::AccuracyHandsUnc: return "AccuracyHandsUnc";
    }
    return "?";
}

const char* domain_name(ValueDomain d) {
    switch (d) {
        case ValueDomain::Duration: return "duration";
        case ValueDomain::Count: return "count";
        case ValueDomain::Rate: return "rate";
        case ValueDomain::NonNegative: return "non-negative";
        case ValueDomain::Binary: return "binary";
        case ValueDomain::Likert: return "likert";
        case ValueDomain::Ssq: return "ssq";
        case ValueDomain::Sud: return "sud";
        case ValueDomain::Delta: return "delta";
    }
    return "?";
}

HttpResponse errors_response(int status, const std::vector<std::string>& errors) {
    return {status, json{{"errors", errors}}.dump(2) + "\n"};
}

}  // namespace

json registry_json(const MetricRegistry& registry) {
    json metrics = json::array();
    for (const auto& s : registry.all()) {
        json aggregation = {{"kind", aggregation_name(s.aggregation.kind)}};
        if (!s.aggregation.elements.empty()) aggregation["elements"] = s.aggregation.elements;
        if (s.aggregation.formula != CompoundFormula::None) aggregation["formula"] = formula_name(s.aggregation.formula);
        metrics.push_back({{"key", s.key()},
                           {"id", s.id},
                           {"scope", to_string(s.scope)},
                           {"kind", to_string(s.kind)},
                           {"aggregation", aggregation},
                           {"role", role_name(s.role)},
                           {"unit", s.unit},
                           {"default_direction", to_string(s.default_direction)},
                           {"domain", domain_name(s.domain)},
                           {"parts", s.parts},
                           {"label", s.label}});
    }
    json tasks = json::array();
    for (const auto& t : registry.tasks()) tasks.push_back(to_string(t));
    return {{"metrics", metrics}, {"tasks", tasks}};
}

json rdb_summary(const RawDatabase& rdb) {
    const auto assignments = rdb.assignments();
    std::map<std::string, int> per_technique;
    for (const auto& [pid, t] : assignments) ++per_technique[t];
    json techniques = json::array();
    for (const auto& t : rdb.fixed.techniques)
        techniques.push_back({{"id", t.id}, {"label", t.label}, {"participants", per_technique[t.id]}});
    json scenarios = json::array();
    for (auto s : rdb.fixed.scenarios_included) scenarios.push_back(to_string(s));
    std::set<std::string> keys;
    for (const auto& [pid, q] : rdb.questionnaires)
        for (const auto& [k, v] : q.demographics) keys.insert(k);
    return {{"techniques", techniques},
            {"participants", assignments.size()},
            {"scenarios", scenarios},
            {"demographics_keys", keys},
            {"demographic_constraints", to_json(rdb.fixed)["demographic_constraints"]},
            {"missing_policy", to_string(rdb.fixed.missing_policy)}};
}

WeightConfig parse_recompute_request(const json& body, const MetricRegistry& registry) {
    if (!body.is_object()) throw ConfigError({"request body must be a JSON object"});
    if (!body.contains("weights")) return weight_config_from_json(body, registry);
    std::vector<std::string> errors;
    json config = body.at("weights");
    if (!config.is_object()) throw ConfigError({"weights: expected an object"});
    for (const auto& [key, v] : body.items()) {
        if (key == "weights") continue;
        if (key == "technique_subset" || key == "alpha" || key == "direction_overrides")
            config[key] = v;
        else
            errors.push_back("unknown key '" + key + "'");
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return weight_config_from_json(config, registry);
}

Service::Service(RawDatabase rdb, const MetricRegistry& registry) : rdb_(std::move(rdb)), registry_(registry) {}

HttpResponse Service::get_registry() const { return {200, registry_json(registry_).dump(2) + "\n"}; }

HttpResponse Service::get_summary() const { return {200, rdb_summary(rdb_).dump(2) + "\n"}; }

HttpResponse Service::post_wdb(const std::string& body) const {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        return errors_response(400, {std::string("invalid JSON: ") + e.what()});
    }
    try {
        const auto config = parse_recompute_request(doc, registry_);
        return {200, serialize_wdb(build_wdb(rdb_, config, registry_))};
    } catch (const ConfigError& e) {
        return errors_response(400, e.violations());
    } catch (const SubsetError& e) {
        return errors_response(422, {e.what()});
    } catch (const Error& e) {
        return errors_response(400, {e.what()});
    }
}

struct HttpServer::Impl {
    const Service& service;
    httplib::Server server;

    explicit Impl(const Service& s) : service(s) {
        const auto reply = [](httplib::Response& res, const HttpResponse& r) {
            res.status = r.status;
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_content(r.body, "application/json");
        };
        server.Get("/api/registry", [this, reply](const httplib::Request&, httplib::Response& res) {
            reply(res, service.get_registry());
        });
        server.Get("/api/rdb/summary", [this, reply](const httplib::Request&, httplib::Response& res) {
            reply(res, service.get_summary());
        });
        server.Post("/api/wdb", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.post_wdb(req.body));
        });
        server.Options("/api/wdb", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Methods", "POST, GET, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace locoscore
