#include "locoscore/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "locoscore/error.hpp"

namespace locoscore {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

/// Iterates non-blank lines, skipping a leading `header` line.
template <typename Fn>
void for_each_line(std::istream& in, const char* header, Fn&& fn) {
    std::string raw;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (first && line == header) {
            first = false;
            continue;
        }
        first = false;
        fn(line, line_no);
    }
}

TaskRef parse_task_fields(std::string_view scenario, std::string_view task, const std::string& source,
                          std::size_t line) {
    const auto s = parse_scenario(scenario);
    if (!s) throw ParseError(source, line, "scenario", "unknown scenario '" + std::string(scenario) + "'");
    const auto t = parse_task(std::string(scenario) + "." + std::string(task));
    if (!t) throw ParseError(source, line, "task", "unknown task '" + std::string(task) + "'");
    return *t;
}

bool parse_flag(std::string_view s, const std::string& source, std::size_t line, const char* field) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false" || s.empty()) return false;
    throw ParseError(source, line, field, "expected 0/1");
}

}  // namespace

std::vector<LogRecord> parse_logs(std::istream& in, const std::string& source,
                                  const MetricRegistry& registry) {
    std::vector<LogRecord> out;
    for_each_line(in, kLogHeader, [&](std::string_view line, std::size_t no) {
        const auto f = split_csv(line);
        if (f.size() != 7)
            throw ParseError(source, no, "", "expected 7 comma-separated fields, got " +
                                                 std::to_string(f.size()));
        LogRecord r;
        r.line = no;
        r.participant = std::string(f[0]);
        r.technique = std::string(f[1]);
        if (r.participant.empty()) throw ParseError(source, no, "participant", "empty participant id");
        if (r.technique.empty()) throw ParseError(source, no, "technique", "empty technique id");
        r.task = parse_task_fields(f[2], f[3], source, no);
        r.metric = std::string(f[4]);
        const auto* spec = registry.find(Scope::of(r.task), r.metric);
        if (spec == nullptr || spec->aggregation.kind == Aggregation::Kind::Cumulative)
            throw ParseError(source, no, "metric",
                             "unknown metric '" + r.metric + "' for " + to_string(r.task));
        r.part = std::string(f[5]);
        if (spec->has_parts()) {
            if (std::find(spec->parts.begin(), spec->parts.end(), r.part) == spec->parts.end())
                throw ParseError(source, no, "part", "unknown part '" + r.part + "' for " + r.metric);
        } else if (!r.part.empty()) {
            throw ParseError(source, no, "part", r.metric + " has no parts");
        }
        if (r.metric == metric_ids::kStairsChoice) {
            if (f[6] == "ST")
                r.value = 1.0;
            else if (f[6] == "SL")
                r.value = 0.0;
            else
                throw ParseError(source, no, "value", "StairsChoice must be ST or SL");
        } else {
            const auto v = parse_number(f[6]);
            if (!v) throw ParseError(source, no, "value", "not a number: '" + std::string(f[6]) + "'");
            r.value = *v;
        }
        out.push_back(std::move(r));
    });
    return out;
}

double average_over_targets(std::span<const double> values) {
    if (values.size() != 6)
        throw Error("expected 6 target values, got " + std::to_string(values.size()));
    return std::accumulate(values.begin(), values.end(), 0.0) / 6.0;
}

std::vector<TrajectoryRecord> parse_trajectories(std::istream& in, const std::string& source) {
    std::map<std::tuple<std::string, std::string, TaskRef>, std::vector<TrajectorySample>> grouped;
    for_each_line(in, kTrajectoryHeader, [&](std::string_view line, std::size_t no) {
        const auto f = split_csv(line);
        if (f.size() != 9)
            throw ParseError(source, no, "", "expected 9 fields, got " + std::to_string(f.size()));
        const auto task = parse_task_fields(f[2], f[3], source, no);
        TrajectorySample s;
        const auto t = parse_number(f[4]);
        const auto dev = parse_number(f[5]);
        if (!t) throw ParseError(source, no, "t", "not a number");
        if (!dev || *dev < 0) throw ParseError(source, no, "path_dev", "expected a non-negative number");
        s.t = *t;
        s.path_dev = *dev;
        s.looking_at_target = parse_flag(f[6], source, no, "looking_at_target");
        s.gaze_uncoupled = parse_flag(f[7], source, no, "gaze_uncoupled");
        s.arms_stretched = parse_flag(f[8], source, no, "arms_stretched");
        auto& samples = grouped[{std::string(f[0]), std::string(f[1]), task}];
        if (!samples.empty() && !(s.t > samples.back().t))
            throw ParseError(source, no, "t", "sample times must be strictly increasing");
        samples.push_back(s);
    });
    std::vector<TrajectoryRecord> out;
    for (auto& [key, samples] : grouped)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::move(samples)});
    return out;
}

std::vector<HeartRatePair> parse_heart_rates(std::istream& in, const std::string& source) {
    std::vector<HeartRatePair> out;
    for_each_line(in, kHeartRateHeader, [&](std::string_view line, std::size_t no) {
        const auto f = split_csv(line);
        if (f.size() != 4)
            throw ParseError(source, no, "", "expected 4 fields, got " + std::to_string(f.size()));
        const auto s = parse_scenario(f[1]);
        if (!s) throw ParseError(source, no, "scenario", "unknown scenario");
        const auto before = parse_number(f[2]);
        const auto after = parse_number(f[3]);
        if (!before || *before <= 0) throw ParseError(source, no, "before", "expected a positive number");
        if (!after || *after <= 0) throw ParseError(source, no, "after", "expected a positive number");
        out.push_back({std::string(f[0]), *s, *before, *after});
    });
    return out;
}

StudyConfig StudyConfig::from_json(const json& j) {
    StudyConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "techniques") {
            for (const auto& t : value) {
                if (t.is_string())
                    c.techniques.push_back({t.get<std::string>(), t.get<std::string>()});
                else
                    c.techniques.push_back({t.at("id").get<std::string>(),
                                            t.value("label", t.at("id").get<std::string>())});
            }
        } else if (key == "scenarios_included") {
            for (const auto& s : value) {
                const auto scenario = parse_scenario(s.get<std::string>());
                if (!scenario) throw Error("study config: unknown scenario " + s.dump());
                c.scenarios_included.push_back(*scenario);
            }
        } else if (key == "missing_policy") {
            const auto p = parse_missing_policy(value.get<std::string>());
            if (!p) throw Error("study config: unknown missing_policy " + value.dump());
            c.missing_policy = *p;
        } else if (key == "calibration") {
            c.calibration = value;
        } else {
            throw Error("study config: unknown key '" + key + "'");
        }
    }
    return c;
}

namespace {

bool averaged_task(const TaskRef& t) { return t == TaskRef{Scenario::S2, 1}; }

using ValueKey = std::tuple<std::string, TaskRef, std::string, std::string>;  // participant, task, metric, part

struct Assembly {
    std::map<ValueKey, double> values;
    std::map<ValueKey, std::string> source_technique;

    bool has(const std::string& p, const TaskRef& t, const std::string& metric) const {
        return values.count({p, t, metric, ""}) > 0;
    }
    std::optional<double> get(const std::string& p, const TaskRef& t, const std::string& metric) const {
        const auto it = values.find({p, t, metric, ""});
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
    void set(const std::string& p, const TaskRef& t, const std::string& metric, double v) {
        values[{p, t, metric, ""}] = v;
    }
};

void derive_from_trajectory(Assembly& a, const TrajectoryRecord& tr, const MetricRegistry& registry) {
    const auto& p = tr.participant;
    const auto& task = tr.task;
    const auto scope = Scope::of(task);
    bool used = false;
    if (registry.find(scope, metric_ids::kComplTime) && !a.has(p, task, metric_ids::kComplTime)) {
        a.set(p, task, metric_ids::kComplTime, tr.samples.back().t);
        used = true;
    }
    for (const char* id : {metric_ids::kStPathDev, metric_ids::kAvoidance}) {
        if (registry.find(scope, id) && !a.has(p, task, id)) {
            a.set(p, task, id, st_path_dev(tr.samples));
            used = true;
        }
    }
    const std::pair<const char*, SampleFlag> rates[] = {
        {metric_ids::kLookAtRate, SampleFlag::LookingAtTarget},
        {metric_ids::kGazeUncRate, SampleFlag::GazeUncoupled},
        {metric_ids::kStrcRate, SampleFlag::ArmsStretched}};
    for (const auto& [id, flag] : rates) {
        if (registry.find(scope, id) && !a.has(p, task, id)) {
            a.set(p, task, id, flagged_rate(tr.samples, flag));
            used = true;
        }
    }
    if (!used && !registry.find(scope, metric_ids::kStPathDev) && !registry.find(scope, metric_ids::kAvoidance))
        throw Error("trajectory for " + p + " on " + to_string(task) +
                    ": task has no trajectory-derived metrics");
}

void derive_compounds(Assembly& a, const std::set<std::string>& participants,
                      const MetricRegistry& registry) {
    for (const auto& spec : registry.all()) {
        if (spec.aggregation.kind != Aggregation::Kind::Compound) continue;
        const auto task = spec.scope.task_ref();
        for (const auto& p : participants) {
            if (a.has(p, task, spec.id)) continue;
            const auto dev = a.get(p, task, metric_ids::kStPathDev);
            const auto time = a.get(p, task, metric_ids::kComplTime);
            auto rate = a.get(p, task, compound_rate_id(spec.aggregation.formula));
            const auto coins = a.get(p, task, metric_ids::kScore);
            if (!rate && coins && spec.aggregation.formula == CompoundFormula::AccuracyHandsUnc) {
                const double c = *coins;
                if (c != static_cast<int>(c)) throw Error(p + " " + to_string(task) + ": Score must be an integer");
                rate = score_rate(static_cast<int>(c));
            }
            const bool any = dev || rate || coins;
            if (!any) continue;
            if (!dev || !rate || !time)
                throw Error(p + " " + to_string(task) + ": incomplete inputs for " + spec.id +
                            " (need STPathDev, ComplTime and " +
                            compound_rate_id(spec.aggregation.formula) + ")");
            const double nr = nr_st_path_dev(*dev, *max_dist(task), *time);
            a.set(p, task, spec.id, compound_accuracy(*rate, nr));
        }
    }
}

}  // namespace

RawDatabase assemble_rdb(std::span<const LogRecord> records,
                         std::span<const QuestionnaireAnswers> questionnaires,
                         std::span<const HeartRatePair> heart_rates, const StudyConfig& study,
                         std::span<const TrajectoryRecord> trajectories) {
    const auto& registry = builtin_registry();
    Assembly a;
    std::set<std::string> participants;
    std::map<std::string, std::set<std::string>> techniques_of;

    std::map<ValueKey, std::vector<double>> raw;
    for (const auto& r : records) {
        const ValueKey key{r.participant, r.task, r.metric, r.part};
        raw[key].push_back(r.value);
        a.source_technique.emplace(key, r.technique);
        participants.insert(r.participant);
        techniques_of[r.participant].insert(r.technique);
    }
    for (const auto& [key, values] : raw) {
        const auto& [p, task, metric, part] = key;
        if (averaged_task(task)) {
            try {
                a.values[key] = average_over_targets(values);
            } catch (const Error& e) {
                throw Error(p + " " + to_string(task) + "." + metric + ": " + e.what());
            }
        } else {
            if (values.size() != 1)
                throw Error(p + " " + to_string(task) + "." + metric + (part.empty() ? "" : "[" + part + "]") +
                            ": logged " + std::to_string(values.size()) + " times");
            a.values[key] = values.front();
        }
    }

    for (const auto& tr : trajectories) {
        participants.insert(tr.participant);
        techniques_of[tr.participant].insert(tr.technique);
        derive_from_trajectory(a, tr, registry);
    }
    derive_compounds(a, participants, registry);

    RawDatabase rdb;
    for (const auto& q : questionnaires) {
        if (!rdb.questionnaires.emplace(q.participant, q).second)
            throw Error("two questionnaires for participant " + q.participant);
        techniques_of[q.participant].insert(q.technique);
    }

    // Each value keeps the technique of the record it came from, so conflicting
    // assignments surface through validate_rdb.
    for (const auto& [key, value] : a.values) {
        const auto& [p, task, metric, part] = key;
        const auto it = a.source_technique.find(key);
        const auto& technique =
            it != a.source_technique.end() ? it->second : *techniques_of[p].begin();
        rdb.measurements.push_back({p, technique, task, metric, part, value});
    }

    rdb.heart_rates.assign(heart_rates.begin(), heart_rates.end());

    std::set<std::pair<std::string, Scenario>> involved;
    for (const auto& m : rdb.measurements) involved.emplace(m.participant, m.task.scenario);
    for (const auto& [id, q] : rdb.questionnaires)
        for (const auto& [s, _] : q.after_scenario) involved.emplace(id, s);
    std::set<std::pair<std::string, Scenario>> hr;
    for (const auto& h : rdb.heart_rates) hr.emplace(h.participant, h.scenario);
    for (const auto& [p, s] : involved)
        if (!hr.count({p, s}))
            throw Error("missing heart-rate pair for participant " + p + " in scenario " + to_string(s));

    if (!study.techniques.empty()) {
        rdb.fixed.techniques = study.techniques;
    } else {
        std::set<std::string> ids;
        for (const auto& [_, ts] : techniques_of) ids.insert(ts.begin(), ts.end());
        for (const auto& id : ids) rdb.fixed.techniques.push_back({id, id});
    }
    if (!study.scenarios_included.empty()) {
        rdb.fixed.scenarios_included = study.scenarios_included;
    } else {
        std::set<Scenario> seen;
        for (const auto& [_, s] : involved) seen.insert(s);
        for (const auto& h : rdb.heart_rates) seen.insert(h.scenario);
        rdb.fixed.scenarios_included.assign(seen.begin(), seen.end());
    }
    rdb.fixed.missing_policy = study.missing_policy;
    rdb.fixed.calibration = study.calibration;
    rdb.normalize();
    return rdb;
}

RawDatabase filter_demographics(const RawDatabase& rdb,
                                std::span<const DemographicConstraint> constraints) {
    for (const auto& c : constraints) {
        const bool known = std::any_of(rdb.questionnaires.begin(), rdb.questionnaires.end(),
                                       [&](const auto& kv) { return kv.second.demographics.count(c.key) > 0; });
        if (!known) throw Error("demographic constraint on unknown key '" + c.key + "'");
    }
    std::set<std::string> keep;
    for (const auto& p : rdb.participants()) {
        const auto it = rdb.questionnaires.find(p);
        bool ok = true;
        for (const auto& c : constraints) {
            if (it == rdb.questionnaires.end()) {
                ok = false;
                break;
            }
            const auto d = it->second.demographics.find(c.key);
            if (d == it->second.demographics.end() || !c.matches(d->second)) {
                ok = false;
                break;
            }
        }
        if (ok) keep.insert(p);
    }

    RawDatabase out;
    out.fixed = rdb.fixed;
    out.fixed.demographic_constraints.insert(out.fixed.demographic_constraints.end(), constraints.begin(),
                                             constraints.end());
    for (const auto& m : rdb.measurements)
        if (keep.count(m.participant)) out.measurements.push_back(m);
    for (const auto& [id, q] : rdb.questionnaires)
        if (keep.count(id)) out.questionnaires.emplace(id, q);
    for (const auto& h : rdb.heart_rates)
        if (keep.count(h.participant)) out.heart_rates.push_back(h);
    return out;
}

RawDatabase ingest_directories(const std::filesystem::path& log_dir,
                               const std::filesystem::path& questionnaire_dir, const StudyConfig& study_in,
                               const QuestionMap& map) {
    namespace fs = std::filesystem;
    const auto sorted_files = [](const fs::path& dir) {
        std::vector<fs::path> files;
        if (dir.empty()) return files;
        if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().filename().string().front() != '.') files.push_back(e.path());
        std::sort(files.begin(), files.end());
        return files;
    };
    const auto ends_with = [](const std::string& s, std::string_view suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    const auto open = [](const fs::path& p) {
        std::ifstream in(p);
        if (!in) throw Error("cannot read " + p.string());
        return in;
    };

    StudyConfig study = study_in;
    std::vector<LogRecord> records;
    std::vector<TrajectoryRecord> trajectories;
    std::vector<HeartRatePair> heart_rates;
    for (const auto& file : sorted_files(log_dir)) {
        const auto name = file.filename().string();
        auto in = open(file);
        if (ends_with(name, ".traj.csv")) {
            auto t = parse_trajectories(in, name);
            trajectories.insert(trajectories.end(), t.begin(), t.end());
        } else if (ends_with(name, ".hr.csv")) {
            auto h = parse_heart_rates(in, name);
            heart_rates.insert(heart_rates.end(), h.begin(), h.end());
        } else if (ends_with(name, ".json")) {
            try {
                study.calibration[name] = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ParseError(name, 0, "", e.what());
            }
        } else {
            auto r = parse_logs(in, name);
            records.insert(records.end(), r.begin(), r.end());
        }
    }

    std::vector<QuestionnaireAnswers> questionnaires;
    for (const auto& file : sorted_files(questionnaire_dir)) {
        const auto name = file.filename().string();
        if (!ends_with(name, ".json")) continue;
        auto in = open(file);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(name, 0, "", e.what());
        }
        questionnaires.push_back(parse_questionnaire(doc, name, map));
    }
    return assemble_rdb(records, questionnaires, heart_rates, study, trajectories);
}

}  // namespace locoscore
