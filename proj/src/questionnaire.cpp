#include "locoscore/questionnaire.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "locoscore/error.hpp"

namespace locoscore {

using nlohmann::json;

const SsqScoring& SsqScoring::kennedy() {
    static const SsqScoring s = [] {
        SsqScoring out;
        // 1-based item numbers on the published worksheet.
        for (int i : {1, 6, 7, 8, 9, 15, 16}) out.nausea[i - 1] = true;
        for (int i : {1, 2, 3, 4, 5, 9, 11}) out.oculomotor[i - 1] = true;
        for (int i : {5, 8, 10, 11, 12, 13, 14}) out.disorientation[i - 1] = true;
        return out;
    }();
    return s;
}

SsqScores ssq_scores(std::span<const int> answers, const SsqScoring& scoring) {
    if (answers.size() != kSsqItems)
        throw Error("SSQ needs " + std::to_string(kSsqItems) + " items, got " +
                    std::to_string(answers.size()));
    int n = 0, o = 0, d = 0;
    for (std::size_t i = 0; i < kSsqItems; ++i) {
        const int v = answers[i];
        if (v < 0 || v > 3) throw Error("SSQ item " + std::to_string(i + 1) + " outside 0..3");
        if (scoring.nausea[i]) n += v;
        if (scoring.oculomotor[i]) o += v;
        if (scoring.disorientation[i]) d += v;
    }
    return {n * scoring.nausea_scale, o * scoring.oculomotor_scale,
            d * scoring.disorientation_scale, (n + o + d) * scoring.total_scale};
}

double likert_metric(std::span<const int> answers) {
    if (answers.empty()) throw Error("no Likert answers");
    for (int v : answers)
        if (v < 1 || v > 5) throw Error("Likert score " + std::to_string(v) + " outside 1..5");
    return std::accumulate(answers.begin(), answers.end(), 0.0) / static_cast<double>(answers.size());
}

double sud_value(double answer, double sud_max) {
    if (!(answer >= 0.0 && answer <= sud_max))
        throw Error("SUD value outside [0," + std::to_string(sud_max) + "]");
    return answer;
}

int QuestionMap::expected(const std::string& metric_id) const {
    const auto it = questions.find(metric_id);
    return it == questions.end() ? 0 : it->second;
}

QuestionMap QuestionMap::defaults() {
    QuestionMap m;
    for (const auto& id : scenario_subjective_ids()) m.questions[id] = 0;
    for (const auto& id : overall_subjective_ids()) m.questions[id] = 0;
    return m;
}

QuestionMap QuestionMap::from_json(const json& j) {
    QuestionMap m = defaults();
    for (const auto& [key, value] : j.items()) {
        if (key == "sud_max") {
            m.sud_max = value.get<double>();
        } else if (key == "questions") {
            for (const auto& [id, n] : value.items()) {
                if (!m.questions.count(id)) throw Error("question map: unknown metric '" + id + "'");
                m.questions[id] = n.get<int>();
            }
        } else {
            throw Error("question map: unknown key '" + key + "'");
        }
    }
    return m;
}

namespace {

SsqAnswers parse_ssq(const json& j, const std::string& source, const std::string& field) {
    if (!j.is_array() || j.size() != kSsqItems)
        throw ParseError(source, 0, field, "expected an array of 16 SSQ items");
    SsqAnswers out{};
    for (std::size_t i = 0; i < kSsqItems; ++i) {
        if (!j[i].is_number_integer())
            throw ParseError(source, 0, field, "SSQ item " + std::to_string(i + 1) + " is not an integer");
        out[i] = j[i].get<int>();
        if (out[i] < 0 || out[i] > 3)
            throw ParseError(source, 0, field, "SSQ item " + std::to_string(i + 1) + " outside 0..3");
    }
    return out;
}

std::vector<int> parse_likert(const json& j, const std::string& source, const std::string& field,
                              int expected) {
    std::vector<int> out;
    if (j.is_number_integer()) {
        out.push_back(j.get<int>());
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number_integer()) throw ParseError(source, 0, field, "non-integer Likert score");
            out.push_back(v.get<int>());
        }
    } else {
        throw ParseError(source, 0, field, "expected a score or an array of scores");
    }
    if (out.empty()) throw ParseError(source, 0, field, "no answers");
    for (int v : out)
        if (v < 1 || v > 5) throw ParseError(source, 0, field, "Likert score outside 1..5");
    if (expected > 0 && static_cast<int>(out.size()) != expected)
        throw ParseError(source, 0, field,
                         "expected " + std::to_string(expected) + " questions, got " +
                             std::to_string(out.size()));
    return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& source,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ParseError(source, 0, where + key, "unknown field");
}

}  // namespace

QuestionnaireAnswers parse_questionnaire(const json& doc, const std::string& source,
                                         const QuestionMap& map) {
    if (!doc.is_object()) throw ParseError(source, 0, "", "questionnaire must be a JSON object");
    reject_unknown(doc, {"participant", "technique", "pre_test", "after_scenario", "post_test"}, source,
                   "");
    QuestionnaireAnswers q;
    if (!doc.contains("participant") || !doc["participant"].is_string())
        throw ParseError(source, 0, "participant", "missing participant id");
    if (!doc.contains("technique") || !doc["technique"].is_string())
        throw ParseError(source, 0, "technique", "missing technique id");
    q.participant = doc["participant"].get<std::string>();
    q.technique = doc["technique"].get<std::string>();
    if (q.participant.empty()) throw ParseError(source, 0, "participant", "empty participant id");

    if (doc.contains("pre_test")) {
        const auto& pre = doc["pre_test"];
        reject_unknown(pre, {"demographics", "ssq"}, source, "pre_test.");
        if (pre.contains("demographics")) {
            for (const auto& [k, v] : pre["demographics"].items()) {
                if (!v.is_primitive() || v.is_null())
                    throw ParseError(source, 0, "pre_test.demographics." + k, "expected a scalar");
                q.demographics[k] = v;
            }
        }
        if (pre.contains("ssq")) q.pre_ssq = parse_ssq(pre["ssq"], source, "pre_test.ssq");
    }

    if (doc.contains("after_scenario")) {
        for (const auto& [sname, answers] : doc["after_scenario"].items()) {
            const auto scenario = parse_scenario(sname);
            if (!scenario) throw ParseError(source, 0, "after_scenario." + sname, "unknown scenario");
            std::map<std::string, std::vector<int>> dest;
            for (const auto& [id, v] : answers.items()) {
                const std::string field = "after_scenario." + sname + "." + id;
                if (id == "sud") {
                    if (*scenario != Scenario::S2)
                        throw ParseError(source, 0, field, "SUD is only collected after S2");
                    if (!v.is_number()) throw ParseError(source, 0, field, "SUD must be a number");
                    const double s = v.get<double>();
                    if (!(s >= 0.0 && s <= map.sud_max))
                        throw ParseError(source, 0, field, "SUD outside the configured range");
                    q.sud = s;
                    continue;
                }
                const auto& ids = scenario_subjective_ids();
                if (std::find(ids.begin(), ids.end(), id) == ids.end())
                    throw ParseError(source, 0, field, "unknown after-scenario metric");
                dest[id] = parse_likert(v, source, field, map.expected(id));
            }
            if (!dest.empty()) q.after_scenario[*scenario] = std::move(dest);
        }
    }

    if (doc.contains("post_test")) {
        for (const auto& [id, v] : doc["post_test"].items()) {
            const std::string field = "post_test." + id;
            if (id == "ssq") {
                q.post_ssq = parse_ssq(v, source, field);
                continue;
            }
            const auto& ids = overall_subjective_ids();
            if (std::find(ids.begin(), ids.end(), id) == ids.end())
                throw ParseError(source, 0, field, "unknown post-test metric");
            q.post_test[id] = parse_likert(v, source, field, map.expected(id));
        }
    }
    return q;
}

json to_json(const QuestionnaireAnswers& q) {
    json doc;
    doc["participant"] = q.participant;
    doc["technique"] = q.technique;
    json pre = json::object();
    json demo = json::object();
    for (const auto& [k, v] : q.demographics) demo[k] = v;
    pre["demographics"] = demo;
    if (q.pre_ssq) pre["ssq"] = *q.pre_ssq;
    doc["pre_test"] = pre;
    json after = json::object();
    for (const auto& [s, answers] : q.after_scenario) {
        json a = json::object();
        for (const auto& [id, v] : answers) a[id] = v;
        if (s == Scenario::S2 && q.sud) a["sud"] = *q.sud;
        after[to_string(s)] = a;
    }
    if (q.sud && !q.after_scenario.count(Scenario::S2)) after["S2"] = json{{"sud", *q.sud}};
    doc["after_scenario"] = after;
    json post = json::object();
    for (const auto& [id, v] : q.post_test) post[id] = v;
    if (q.post_ssq) post["ssq"] = *q.post_ssq;
    doc["post_test"] = post;
    return doc;
}

std::optional<SsqScores> scored_ssq(const QuestionnaireAnswers& q, SsqMode mode) {
    if (!q.post_ssq) return std::nullopt;
    const auto post = ssq_scores(*q.post_ssq);
    if (mode == SsqMode::PostOnly) return post;
    if (!q.pre_ssq) return std::nullopt;
    const auto pre = ssq_scores(*q.pre_ssq);
    return SsqScores{post.nausea - pre.nausea, post.oculomotor - pre.oculomotor,
                     post.disorientation - pre.disorientation, post.total - pre.total};
}

}  // namespace locoscore
