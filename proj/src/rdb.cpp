#include "locoscore/rdb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "locoscore/error.hpp"

namespace locoscore {

using nlohmann::json;

std::string to_string(MissingPolicy p) {
    switch (p) {
        case MissingPolicy::Discard: return "discard";
        case MissingPolicy::MeanFill: return "mean-fill";
        case MissingPolicy::WorstFill: return "worst-fill";
    }
    return "?";
}

std::optional<MissingPolicy> parse_missing_policy(std::string_view text) {
    if (text == "discard") return MissingPolicy::Discard;
    if (text == "mean-fill") return MissingPolicy::MeanFill;
    if (text == "worst-fill") return MissingPolicy::WorstFill;
    return std::nullopt;
}

bool DemographicConstraint::matches(const json& actual) const {
    if (actual.is_number() && value.is_number()) {
        const double a = actual.get<double>();
        const double b = value.get<double>();
        if (op == "==") return a == b;
        if (op == "!=") return a != b;
        if (op == "<") return a < b;
        if (op == "<=") return a <= b;
        if (op == ">") return a > b;
        if (op == ">=") return a >= b;
        return false;
    }
    if (op == "==") return actual == value;
    if (op == "!=") return actual != value;
    return false;
}

DemographicConstraint parse_constraint(std::string_view text) {
    static const std::vector<std::string> ops{"<=", ">=", "==", "!=", "<", ">"};
    for (const auto& op : ops) {
        const auto pos = text.find(op);
        if (pos == std::string_view::npos) continue;
        const auto trim = [](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
            return std::string(s);
        };
        DemographicConstraint c;
        c.key = trim(text.substr(0, pos));
        c.op = op;
        const auto rhs = trim(text.substr(pos + op.size()));
        if (c.key.empty() || rhs.empty()) break;
        char* end = nullptr;
        const double number = std::strtod(rhs.c_str(), &end);
        if (end != nullptr && *end == '\0')
            c.value = number;
        else
            c.value = rhs;
        return c;
    }
    throw Error("malformed demographic constraint: '" + std::string(text) + "'");
}

bool FixedPart::includes(Scenario s) const {
    return std::find(scenarios_included.begin(), scenarios_included.end(), s) !=
           scenarios_included.end();
}

bool FixedPart::has_technique(const std::string& id) const {
    return std::any_of(techniques.begin(), techniques.end(),
                       [&](const TechniqueInfo& t) { return t.id == id; });
}

std::map<std::string, std::string> RawDatabase::assignments() const {
    std::map<std::string, std::string> out;
    for (const auto& m : measurements) out.emplace(m.participant, m.technique);
    for (const auto& [id, q] : questionnaires) out.emplace(id, q.technique);
    return out;
}

std::vector<std::string> RawDatabase::participants() const {
    std::set<std::string> ids;
    for (const auto& m : measurements) ids.insert(m.participant);
    for (const auto& [id, _] : questionnaires) ids.insert(id);
    for (const auto& h : heart_rates) ids.insert(h.participant);
    return {ids.begin(), ids.end()};
}

void RawDatabase::normalize() {
    std::sort(measurements.begin(), measurements.end(), [](const Measurement& a, const Measurement& b) {
        return std::tie(a.participant, a.task, a.metric, a.part) <
               std::tie(b.participant, b.task, b.metric, b.part);
    });
    std::sort(heart_rates.begin(), heart_rates.end(), [](const HeartRatePair& a, const HeartRatePair& b) {
        return std::tie(a.participant, a.scenario) < std::tie(b.participant, b.scenario);
    });
    std::sort(fixed.scenarios_included.begin(), fixed.scenarios_included.end());
}

// ---------------------------------------------------------------------------
// JSON document
// ---------------------------------------------------------------------------

namespace {

json constraint_json(const DemographicConstraint& c) {
    return {{"key", c.key}, {"op", c.op}, {"value", c.value}};
}

template <typename T>
T require(const json& obj, const char* field, const std::string& where) {
    if (!obj.contains(field)) throw ParseError("rdb", 0, where + field, "missing field");
    try {
        return obj.at(field).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("rdb", 0, where + field, e.what());
    }
}

Scenario require_scenario(const json& obj, const std::string& where) {
    const auto text = require<std::string>(obj, "scenario", where);
    const auto s = parse_scenario(text);
    if (!s) throw ParseError("rdb", 0, where + "scenario", "unknown scenario '" + text + "'");
    return *s;
}

}  // namespace

json to_json(const FixedPart& f) {
    json fixed;
    fixed["techniques"] = json::array();
    for (const auto& t : f.techniques) fixed["techniques"].push_back({{"id", t.id}, {"label", t.label}});
    fixed["scenarios_included"] = json::array();
    for (auto s : f.scenarios_included) fixed["scenarios_included"].push_back(to_string(s));
    fixed["demographic_constraints"] = json::array();
    for (const auto& c : f.demographic_constraints) fixed["demographic_constraints"].push_back(constraint_json(c));
    fixed["missing_policy"] = to_string(f.missing_policy);
    fixed["calibration"] = f.calibration;
    return fixed;
}

json to_json(const RawDatabase& rdb_in) {
    RawDatabase rdb = rdb_in;
    rdb.normalize();
    const json fixed = to_json(rdb.fixed);

    json measurements = json::array();
    for (const auto& m : rdb.measurements) {
        measurements.push_back({{"participant", m.participant},
                                {"technique", m.technique},
                                {"scenario", to_string(m.task.scenario)},
                                {"task", "T" + std::to_string(m.task.task)},
                                {"metric", m.metric},
                                {"part", m.part},
                                {"value", m.value}});
    }

    json questionnaires = json::object();
    for (const auto& [id, q] : rdb.questionnaires) questionnaires[id] = to_json(q);

    json heart_rates = json::array();
    for (const auto& h : rdb.heart_rates)
        heart_rates.push_back({{"participant", h.participant},
                               {"scenario", to_string(h.scenario)},
                               {"before", h.before},
                               {"after", h.after}});

    return {{"fixed", fixed},
            {"measurements", measurements},
            {"questionnaires", questionnaires},
            {"heart_rates", heart_rates}};
}

RawDatabase rdb_from_json(const json& doc, const QuestionMap& map) {
    if (!doc.is_object()) throw ParseError("rdb", 0, "", "RDB must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "fixed" && key != "measurements" && key != "questionnaires" && key != "heart_rates")
            throw ParseError("rdb", 0, key, "unknown section");

    RawDatabase rdb;
    const json fixed = doc.value("fixed", json::object());
    for (const auto& t : fixed.value("techniques", json::array()))
        rdb.fixed.techniques.push_back(
            {require<std::string>(t, "id", "fixed.techniques."), t.value("label", std::string{})});
    for (const auto& s : fixed.value("scenarios_included", json::array())) {
        const auto scenario = parse_scenario(s.get<std::string>());
        if (!scenario) throw ParseError("rdb", 0, "fixed.scenarios_included", "unknown scenario");
        rdb.fixed.scenarios_included.push_back(*scenario);
    }
    for (const auto& c : fixed.value("demographic_constraints", json::array()))
        rdb.fixed.demographic_constraints.push_back(
            {require<std::string>(c, "key", "fixed.demographic_constraints."),
             require<std::string>(c, "op", "fixed.demographic_constraints."), c.value("value", json())});
    if (fixed.contains("missing_policy")) {
        const auto p = parse_missing_policy(fixed["missing_policy"].get<std::string>());
        if (!p) throw ParseError("rdb", 0, "fixed.missing_policy", "unknown policy");
        rdb.fixed.missing_policy = *p;
    }
    rdb.fixed.calibration = fixed.value("calibration", json::object());

    for (const auto& m : doc.value("measurements", json::array())) {
        const std::string where = "measurements.";
        Measurement out;
        out.participant = require<std::string>(m, "participant", where);
        out.technique = require<std::string>(m, "technique", where);
        const auto scenario = require_scenario(m, where);
        const auto task_text = to_string(scenario) + "." + require<std::string>(m, "task", where);
        const auto task = parse_task(task_text);
        if (!task) throw ParseError("rdb", 0, where + "task", "unknown task '" + task_text + "'");
        out.task = *task;
        out.metric = require<std::string>(m, "metric", where);
        out.part = m.value("part", std::string{});
        out.value = require<double>(m, "value", where);
        rdb.measurements.push_back(std::move(out));
    }

    const json questionnaires = doc.value("questionnaires", json::object());
    for (const auto& [id, q] : questionnaires.items()) {
        auto parsed = parse_questionnaire(q, "rdb.questionnaires." + id, map);
        if (parsed.participant != id)
            throw ParseError("rdb", 0, "questionnaires." + id, "participant id mismatch");
        rdb.questionnaires.emplace(id, std::move(parsed));
    }

    for (const auto& h : doc.value("heart_rates", json::array())) {
        const std::string where = "heart_rates.";
        rdb.heart_rates.push_back({require<std::string>(h, "participant", where),
                                   require_scenario(h, where), require<double>(h, "before", where),
                                   require<double>(h, "after", where)});
    }
    rdb.normalize();
    return rdb;
}

void save_rdb(const RawDatabase& rdb, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json(rdb).dump(2) << '\n';
}

RawDatabase load_rdb(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, "", e.what());
    }
    return rdb_from_json(doc);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string domain_violation(const MetricSpec& spec, double v, double sud_max) {
    if (!std::isfinite(v)) return "non-finite value";
    switch (spec.domain) {
        case ValueDomain::Duration:
            if (v < 0) return "negative duration";
            break;
        case ValueDomain::Count:
            if (v < 0 || v != std::floor(v)) return "count must be a non-negative integer";
            break;
        case ValueDomain::Rate:
            if (v < 0 || v > 1) return "rate outside [0,1]";
            break;
        case ValueDomain::NonNegative:
            if (v < 0) return "negative value";
            break;
        case ValueDomain::Binary:
            if (v != 0 && v != 1) return "binary value must be 0 or 1";
            break;
        case ValueDomain::Likert:
            if (v < 1 || v > 5) return "Likert value outside 1..5";
            break;
        case ValueDomain::Ssq:
            if (v < 0) return "negative SSQ score";
            break;
        case ValueDomain::Sud:
            if (v < 0 || v > sud_max) return "SUD outside range";
            break;
        case ValueDomain::Delta:
            break;
    }
    if (spec.id == metric_ids::kScore && v > 50) return "coin count above 50";
    return {};
}

std::vector<std::string> validate_rdb(const RawDatabase& rdb, const MetricRegistry& registry) {
    std::vector<std::string> out;
    const auto participants = rdb.participants();
    if (participants.empty()) out.push_back("no participants");

    std::set<std::string> technique_ids;
    for (const auto& t : rdb.fixed.techniques) {
        if (t.id.empty()) out.push_back("technique with empty id");
        if (!technique_ids.insert(t.id).second) out.push_back("duplicate technique id '" + t.id + "'");
    }

    std::map<std::string, std::set<std::string>> assigned;
    for (const auto& m : rdb.measurements) assigned[m.participant].insert(m.technique);
    for (const auto& [id, q] : rdb.questionnaires) assigned[id].insert(q.technique);
    for (const auto& [participant, techniques] : assigned) {
        if (techniques.size() > 1) {
            std::string list;
            for (const auto& t : techniques) list += (list.empty() ? "" : ", ") + t;
            out.push_back("duplicate assignment: participant '" + participant +
                          "' listed under techniques " + list);
        }
        for (const auto& t : techniques)
            if (!rdb.fixed.has_technique(t))
                out.push_back("participant '" + participant + "' uses unknown technique '" + t + "'");
    }

    std::set<std::tuple<std::string, TaskRef, std::string, std::string>> seen;
    for (const auto& m : rdb.measurements) {
        const std::string where = m.participant + " " + to_string(m.task) + "." + m.metric +
                                  (m.part.empty() ? "" : "[" + m.part + "]");
        const auto* spec = registry.find(Scope::of(m.task), m.metric);
        if (spec == nullptr || spec->aggregation.kind == Aggregation::Kind::Cumulative) {
            out.push_back(where + ": unregistered metric");
            continue;
        }
        if (!rdb.fixed.includes(m.task.scenario))
            out.push_back(where + ": scenario not included in the study");
        if (spec->has_parts()) {
            if (std::find(spec->parts.begin(), spec->parts.end(), m.part) == spec->parts.end())
                out.push_back(where + ": unknown part '" + m.part + "'");
        } else if (!m.part.empty()) {
            out.push_back(where + ": metric has no parts");
        }
        if (auto v = domain_violation(*spec, m.value); !v.empty()) out.push_back(where + ": " + v);
        if (!seen.emplace(m.participant, m.task, m.metric, m.part).second)
            out.push_back(where + ": duplicate measurement");
    }

    std::set<std::pair<std::string, Scenario>> hr_seen;
    for (const auto& h : rdb.heart_rates) {
        const std::string where = h.participant + " " + to_string(h.scenario) + " heart rate";
        if (!(h.before > 0) || !(h.after > 0)) out.push_back(where + ": readings must be positive");
        if (!rdb.fixed.includes(h.scenario)) out.push_back(where + ": scenario not included in the study");
        if (!hr_seen.emplace(h.participant, h.scenario).second) out.push_back(where + ": duplicate pair");
        if (!assigned.count(h.participant))
            out.push_back(where + ": participant has no technique assignment");
    }

    for (const auto& [id, q] : rdb.questionnaires) {
        for (const auto& [s, _] : q.after_scenario)
            if (!rdb.fixed.includes(s))
                out.push_back(id + " after_scenario." + to_string(s) + ": scenario not included in the study");
        for (const auto& [s, answers] : q.after_scenario)
            for (const auto& [metric, scores] : answers)
                for (int v : scores)
                    if (v < 1 || v > 5) out.push_back(id + " " + metric + ": Likert value outside 1..5");
        for (const auto& [metric, scores] : q.post_test)
            for (int v : scores)
                if (v < 1 || v > 5) out.push_back(id + " " + metric + ": Likert value outside 1..5");
        for (const auto* ssq : {&q.pre_ssq, &q.post_ssq})
            if (*ssq)
                for (int v : **ssq)
                    if (v < 0 || v > 3) out.push_back(id + " SSQ item outside 0..3");
    }
    return out;
}

}  // namespace locoscore
