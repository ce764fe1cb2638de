#include "locoscore/weights.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "locoscore/error.hpp"

namespace locoscore {

using nlohmann::json;

std::string to_string(FrGranularity g) { return g == FrGranularity::PerTask ? "per-task" : "per-scenario"; }
std::string to_string(SsqWeighting w) { return w == SsqWeighting::Components ? "components" : "total"; }

const std::vector<std::string>& nfr_weight_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k{"OS", "AC", "EP", "PE"};
        for (const auto& id : scenario_subjective_ids()) k.push_back(id);
        for (const auto& id : overall_subjective_ids()) k.push_back(id);
        for (const auto& id : ssq_ids()) k.push_back(id);
        return k;
    }();
    return keys;
}

namespace {

bool is_ssq_component(const std::string& id) {
    return id == metric_ids::kSsqNausea || id == metric_ids::kSsqOculomotor ||
           id == metric_ids::kSsqDisorientation;
}

bool in_unit_range(double w) { return std::isfinite(w) && w >= 0.0 && w <= 1.0; }

std::string fmt(double v) {
    json j = v;
    return j.dump();
}

bool known_direction_key(const MetricRegistry& registry, const std::string& key) {
    if (registry.find(key) != nullptr) return true;
    return std::any_of(registry.all().begin(), registry.all().end(),
                       [&](const MetricSpec& s) { return s.id == key; });
}

}  // namespace

std::vector<std::string> WeightConfig::violations(const MetricRegistry& registry) const {
    std::vector<std::string> out;
    for (const auto& [key, w] : fr_weights) {
        if (fr_granularity == FrGranularity::PerScenario) {
            if (!parse_scenario(key)) out.push_back("fr_weights: '" + key + "' is not a scenario (per-scenario granularity)");
        } else if (!parse_task(key)) {
            out.push_back("fr_weights: '" + key + "' is not a task (per-task granularity)");
        }
        if (!in_unit_range(w)) out.push_back("fr_weights." + key + " = " + fmt(w) + " outside [0,1]");
    }
    const auto& keys = nfr_weight_keys();
    for (const auto& [key, w] : nfr_weights) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            out.push_back("nfr_weights: unknown key '" + key + "'");
        if (!in_unit_range(w)) out.push_back("nfr_weights." + key + " = " + fmt(w) + " outside [0,1]");
        if (ssq_mode == SsqWeighting::Total && is_ssq_component(key) && w != 0.0)
            out.push_back("nfr_weights." + key + " is nonzero but ssq_mode is \"total\"");
        if (ssq_mode == SsqWeighting::Components && key == metric_ids::kSsqTotal && w != 0.0)
            out.push_back("nfr_weights." + key + " is nonzero but ssq_mode is \"components\"");
    }
    for (const auto& [name, w] : {std::pair{"w_ST", w_st}, std::pair{"w_RA", w_ra}}) {
        if (w != 0.0 && w != 1.0) out.push_back(std::string(name) + " = " + fmt(w) + " must be 0 or 1");
    }
    if (w_st == 1.0 && w_ra == 1.0) out.push_back("w_ST and w_RA are mutually exclusive (both 1)");
    if (!in_unit_range(w_sud)) out.push_back("w_SUD = " + fmt(w_sud) + " outside [0,1]");
    if (!in_unit_range(alpha)) out.push_back("alpha = " + fmt(alpha) + " outside [0,1]");
    if (!(zscore_threshold > 0.0)) out.push_back("zscore_threshold must be > 0");
    std::set<std::string> seen;
    for (const auto& t : technique_subset) {
        if (t.empty()) out.push_back("technique_subset: empty technique id");
        else if (!seen.insert(t).second) out.push_back("technique_subset: duplicate '" + t + "'");
    }
    for (const auto& [key, dir] : direction_overrides) {
        (void)dir;
        if (!known_direction_key(registry, key))
            out.push_back("direction_overrides: unknown metric '" + key + "'");
    }
    return out;
}

void WeightConfig::validate(const MetricRegistry& registry) const {
    auto v = violations(registry);
    if (!v.empty()) throw ConfigError(std::move(v));
}

double WeightConfig::task_weight(const TaskRef& t) const {
    const auto key = fr_granularity == FrGranularity::PerTask ? to_string(t) : to_string(t.scenario);
    const auto it = fr_weights.find(key);
    return it == fr_weights.end() ? 1.0 : it->second;
}

double WeightConfig::scenario_weight(Scenario s) const {
    if (fr_granularity == FrGranularity::PerScenario) {
        const auto it = fr_weights.find(to_string(s));
        return it == fr_weights.end() ? 1.0 : it->second;
    }
    const auto tasks = tasks_of(s);
    double sum = 0.0;
    for (const auto& t : tasks) sum += task_weight(t);
    return sum / static_cast<double>(tasks.size());
}

double WeightConfig::nfr_weight(const std::string& id) const {
    if (ssq_mode == SsqWeighting::Total && is_ssq_component(id)) return 0.0;
    if (ssq_mode == SsqWeighting::Components && id == metric_ids::kSsqTotal) return 0.0;
    const auto it = nfr_weights.find(id);
    return it == nfr_weights.end() ? 1.0 : it->second;
}

Direction WeightConfig::direction_for(const MetricSpec& spec) const {
    if (const auto it = direction_overrides.find(spec.key()); it != direction_overrides.end()) return it->second;
    if (const auto it = direction_overrides.find(spec.id); it != direction_overrides.end()) return it->second;
    return spec.default_direction;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    std::optional<double> number(const json& v, const std::string& where) {
        if (!v.is_number()) {
            errors_.push_back(where + ": expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::string> string(const json& v, const std::string& where) {
        if (!v.is_string()) {
            errors_.push_back(where + ": expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    void weight_map(const json& v, const std::string& where, std::map<std::string, double>& out) {
        if (!v.is_object()) {
            errors_.push_back(where + ": expected an object");
            return;
        }
        for (const auto& [k, w] : v.items())
            if (auto n = number(w, where + "." + k)) out[k] = *n;
    }

private:
    std::vector<std::string>& errors_;
};

}  // namespace

WeightConfig weight_config_from_json(const json& doc, const MetricRegistry& registry) {
    std::vector<std::string> errors;
    WeightConfig c;
    if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
    Reader r(errors);

    for (const auto& [key, v] : doc.items()) {
        if (key == "fr_granularity") {
            if (auto s = r.string(v, key)) {
                if (*s == "per-scenario") c.fr_granularity = FrGranularity::PerScenario;
                else if (*s == "per-task") c.fr_granularity = FrGranularity::PerTask;
                else errors.push_back("fr_granularity: expected \"per-scenario\" or \"per-task\", got \"" + *s + "\"");
            }
        } else if (key == "fr_weights") {
            r.weight_map(v, key, c.fr_weights);
        } else if (key == "nfr_weights") {
            r.weight_map(v, key, c.nfr_weights);
        } else if (key == "ssq_mode") {
            if (auto s = r.string(v, key)) {
                if (*s == "total") c.ssq_mode = SsqWeighting::Total;
                else if (*s == "components") c.ssq_mode = SsqWeighting::Components;
                else errors.push_back("ssq_mode: expected \"total\" or \"components\", got \"" + *s + "\"");
            }
        } else if (key == "w_ST") {
            if (auto n = r.number(v, key)) c.w_st = *n;
        } else if (key == "w_RA") {
            if (auto n = r.number(v, key)) c.w_ra = *n;
        } else if (key == "w_SUD") {
            if (auto n = r.number(v, key)) c.w_sud = *n;
        } else if (key == "alpha") {
            if (auto n = r.number(v, key)) c.alpha = *n;
        } else if (key == "zscore_threshold") {
            if (auto n = r.number(v, key)) c.zscore_threshold = *n;
        } else if (key == "technique_subset") {
            if (!v.is_array()) {
                errors.push_back("technique_subset: expected an array of technique ids");
            } else {
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (auto s = r.string(v[i], "technique_subset[" + std::to_string(i) + "]"))
                        c.technique_subset.push_back(*s);
            }
        } else if (key == "direction_overrides") {
            if (!v.is_object()) {
                errors.push_back("direction_overrides: expected an object");
            } else {
                for (const auto& [metric, d] : v.items()) {
                    const auto where = "direction_overrides." + metric;
                    if (auto s = r.string(d, where)) {
                        if (auto dir = parse_direction(*s)) c.direction_overrides[metric] = *dir;
                        else errors.push_back(where + ": expected \"positive\" or \"negative\"");
                    }
                }
            }
        } else if (key == "ssq_scoring") {
            if (auto s = r.string(v, key)) {
                if (*s == "post") c.ssq_scoring = SsqMode::PostOnly;
                else if (*s == "delta") c.ssq_scoring = SsqMode::Delta;
                else errors.push_back("ssq_scoring: expected \"post\" or \"delta\", got \"" + *s + "\"");
            }
        } else if (key == "dunn_adjustment") {
            if (auto s = r.string(v, key)) {
                try {
                    c.dunn_adjustment = parse_adjustment(*s);
                } catch (const Error& e) {
                    errors.push_back(std::string("dunn_adjustment: ") + e.what());
                }
            }
        } else {
            errors.push_back("unknown key '" + key + "'");
        }
    }
    for (auto& v : c.violations(registry)) errors.push_back(std::move(v));
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

json to_json(const WeightConfig& c) {
    json j;
    j["fr_granularity"] = to_string(c.fr_granularity);
    j["fr_weights"] = c.fr_weights;
    j["nfr_weights"] = c.nfr_weights;
    j["ssq_mode"] = to_string(c.ssq_mode);
    j["w_ST"] = c.w_st;
    j["w_RA"] = c.w_ra;
    j["w_SUD"] = c.w_sud;
    j["alpha"] = c.alpha;
    j["technique_subset"] = c.technique_subset;
    json dirs = json::object();
    for (const auto& [k, d] : c.direction_overrides) dirs[k] = to_string(d);
    j["direction_overrides"] = dirs;
    j["ssq_scoring"] = c.ssq_scoring == SsqMode::Delta ? "delta" : "post";
    j["dunn_adjustment"] = to_string(c.dunn_adjustment);
    j["zscore_threshold"] = c.zscore_threshold;
    return j;
}

}  // namespace locoscore
