#include <cmath>

#include "locoscore/scoring.hpp"

namespace locoscore {

using nlohmann::json;

namespace {

json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json vector_json(const PointVector& v) {
    json j = json::object();
    for (const auto& [t, p] : v) j[t] = p;
    return j;
}

json statistics_json(const MetricResult& r, const std::vector<std::string>& techniques) {
    json j;
    j["metric"] = r.metric_key;
    j["part"] = r.part;
    j["direction"] = to_string(r.direction);
    json means = json::object(), sizes = json::object();
    for (std::size_t t = 0; t < techniques.size(); ++t) {
        means[techniques[t]] = number(r.means[t]);
        sizes[techniques[t]] = r.sizes[t];
    }
    j["means"] = means;
    j["n"] = sizes;
    j["significant_pairs"] = r.points.significant_pairs;
    if (!r.sig) {
        j["plan"] = nullptr;
        j["untestable"] = r.untestable;
        return j;
    }
    const auto& s = *r.sig;
    j["plan"] = to_string(s.plan);
    j["omnibus_statistic"] = number(s.omnibus_statistic);
    j["omnibus_p"] = number(s.omnibus_p);
    json normality = json::object();
    for (std::size_t t = 0; t < techniques.size(); ++t) normality[techniques[t]] = number(s.normality_p[t]);
    j["normality_p"] = normality;
    json pairs = json::array();
    for (std::size_t a = 0; a < techniques.size(); ++a)
        for (std::size_t b = a + 1; b < techniques.size(); ++b)
            pairs.push_back({{"a", techniques[a]}, {"b", techniques[b]}, {"p", number(s.pairwise_p(a, b))},
                             {"significant", s.significant(a, b)}});
    j["pairwise"] = pairs;
    return j;
}

}  // namespace

json to_json(const WeightedDatabase& w) {
    const auto& table = w.table;
    json doc;
    doc["fixed"] = to_json(w.fixed);
    doc["config"] = to_json(w.config);
    doc["techniques"] = table.techniques;

    json points = json::object();
    for (const auto& [key, v] : table.points) points[key] = vector_json(v);
    doc["points"] = points;

    json scores;
    json tasks = json::object();
    for (const auto& [t, v] : w.task_scores) tasks[to_string(t)] = vector_json(v);
    scores["tasks"] = tasks;
    json scenarios = json::object();
    for (const auto& [s, sc] : w.scenario_scores) {
        scenarios[to_string(s)] = {{"subjective", vector_json(sc.subjective)},
                                   {"tasks", vector_json(sc.tasks)},
                                   {"physical_effort", vector_json(sc.physical_effort)},
                                   {"total", vector_json(sc.total)}};
    }
    scores["scenarios"] = scenarios;
    scores["stairs"] = vector_json(w.stairs);
    scores["fear"] = vector_json(w.fear);
    scores["overall"] = vector_json(w.overall);
    scores["total"] = vector_json(w.total);
    json contributions = json::array();
    for (const auto& c : w.contributions)
        contributions.push_back({{"term", c.term}, {"weight", c.weight}, {"points", vector_json(c.points)}});
    scores["contributions"] = contributions;
    doc["scores"] = scores;

    json ranking = json::array();
    for (std::size_t i = 0; i < w.ranking.size(); ++i) {
        const auto& r = w.ranking[i];
        ranking.push_back({{"rank", i + 1}, {"technique", r.technique}, {"score", r.score}, {"tied", r.tied}});
    }
    doc["ranking"] = ranking;

    json ties = json::array(), untestable = json::array(), outliers = json::array(), stats = json::object();
    for (const auto& r : table.results) {
        for (const auto& [a, b] : r.points.ties) ties.push_back({{"metric", r.key}, {"techniques", {a, b}}});
        if (!r.untestable.empty()) untestable.push_back({{"metric", r.key}, {"reason", r.untestable}});
        for (const auto& o : r.outliers)
            outliers.push_back(
                {{"metric", r.key}, {"technique", o.technique}, {"participant", o.participant}, {"value", o.value}});
        stats[r.key] = statistics_json(r, table.techniques);
    }
    json ranking_ties = json::array();
    for (const auto& r : w.ranking)
        if (r.tied) ranking_ties.push_back(r.technique);
    doc["diagnostics"] = {{"ties", ties},
                          {"ranking_ties", ranking_ties},
                          {"untestable", untestable},
                          {"outliers", outliers},
                          {"statistics", stats}};
    return doc;
}

std::string serialize_wdb(const WeightedDatabase& wdb) { return to_json(wdb).dump(2) + "\n"; }

}  // namespace locoscore
