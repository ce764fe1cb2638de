#include "locoscore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "locoscore/error.hpp"
#include "locoscore/questionnaire.hpp"
#include "locoscore/trajectory.hpp"

namespace locoscore {

namespace {

void add_scaled(PointVector& out, const PointVector& v, double w) {
    for (const auto& [t, p] : v) out[t] += w * p;
}

PointVector zeros(std::span<const std::string> techniques) {
    PointVector v;
    for (const auto& t : techniques) v[t] = 0.0;
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Point normalization
// ---------------------------------------------------------------------------

PointAssignment assign_points(std::span<const std::string> techniques, std::span<const double> means,
                              const SignificanceResult& sig, Direction direction) {
    if (techniques.size() != means.size() || techniques.size() != sig.pairwise_p.size())
        throw Error("assign_points: techniques, means and p-value matrix differ in size");
    PointAssignment out;
    out.points = zeros(techniques);
    for (std::size_t i = 0; i < techniques.size(); ++i) {
        for (std::size_t j = i + 1; j < techniques.size(); ++j) {
            if (!sig.significant(i, j)) continue;
            ++out.significant_pairs;
            if (means[i] == means[j]) {
                out.ties.emplace_back(techniques[i], techniques[j]);
                continue;
            }
            const bool i_higher = means[i] > means[j];
            const bool i_wins = direction == Direction::Positive ? i_higher : !i_higher;
            out.points[techniques[i_wins ? i : j]] += 1.0;
        }
    }
    return out;
}

PointVector cumulative_points(std::span<const PointVector> elements, const std::vector<bool>& had_significance) {
    if (elements.size() != had_significance.size())
        throw Error("cumulative_points: one significance flag per element is required");
    PointVector out;
    int counted = 0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        for (const auto& [t, p] : elements[e]) out[t] += p;
        if (had_significance[e]) ++counted;
    }
    for (auto& [t, p] : out) p = counted == 0 ? 0.0 : p / counted;
    return out;
}

// ---------------------------------------------------------------------------
// Weighted layers
// ---------------------------------------------------------------------------

PointVector task_objective_score(double w_task, double w_os, double w_ac, double w_ep, const PointVector& s_os,
                                 const PointVector& s_ac, const PointVector& s_ep) {
    PointVector inner;
    add_scaled(inner, s_os, w_os);
    add_scaled(inner, s_ac, w_ac);
    add_scaled(inner, s_ep, w_ep);
    PointVector out;
    add_scaled(out, inner, w_task);
    return out;
}

PointVector stairs_score(double w_task, double w_st, double w_ra, const PointVector& s_st, const PointVector& s_ra) {
    const bool valid = (w_st == 0.0 || w_st == 1.0) && (w_ra == 0.0 || w_ra == 1.0) && !(w_st == 1.0 && w_ra == 1.0);
    if (!valid) throw ConfigError({"w_ST/w_RA must be one of (0,0), (0,1), (1,0)"});
    PointVector inner;
    add_scaled(inner, s_st, w_st);
    add_scaled(inner, s_ra, w_ra);
    PointVector out;
    add_scaled(out, inner, w_task);
    return out;
}

PointVector fear_score(double w_task, double w_sud, const PointVector& s_sud) {
    PointVector out;
    add_scaled(out, s_sud, w_task * w_sud);
    return out;
}

PointVector scenario_subjective_score(double w_scenario, const std::map<std::string, double>& metric_weights,
                                      const std::map<std::string, PointVector>& metric_points) {
    PointVector inner;
    for (const auto& [id, pts] : metric_points) {
        const auto it = metric_weights.find(id);
        add_scaled(inner, pts, it == metric_weights.end() ? 1.0 : it->second);
    }
    PointVector out;
    add_scaled(out, inner, w_scenario);
    return out;
}

PointVector scenario_total(const PointVector& subjective, std::span<const PointVector> task_parts, double w_pe,
                           const PointVector& s_pe) {
    PointVector out = subjective;
    for (const auto& t : task_parts) add_scaled(out, t, 1.0);
    add_scaled(out, s_pe, w_pe);
    return out;
}

PointVector overall_subjective_score(const std::map<std::string, double>& weights,
                                     const std::map<std::string, PointVector>& points) {
    const auto weight = [&](const std::string& id) {
        const auto it = weights.find(id);
        return it == weights.end() ? 1.0 : it->second;
    };
    bool component = false;
    for (const char* id : {metric_ids::kSsqNausea, metric_ids::kSsqOculomotor, metric_ids::kSsqDisorientation})
        if (points.count(id) && weight(id) != 0.0) component = true;
    if (component && points.count(metric_ids::kSsqTotal) && weight(metric_ids::kSsqTotal) != 0.0)
        throw ConfigError({"SSQ subscale weights and the SSQ total weight are both nonzero"});
    PointVector out;
    for (const auto& [id, pts] : points) add_scaled(out, pts, weight(id));
    return out;
}

PointVector total_score(const PointVector& overall, std::span<const PointVector> scenario_totals,
                        const PointVector& stairs, const PointVector& fear) {
    PointVector out = overall;
    for (const auto& s : scenario_totals) add_scaled(out, s, 1.0);
    add_scaled(out, stairs, 1.0);
    add_scaled(out, fear, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Point table
// ---------------------------------------------------------------------------

Direction ScoringOptions::direction_for(const MetricSpec& spec) const {
    if (const auto it = direction_overrides.find(spec.key()); it != direction_overrides.end()) return it->second;
    if (const auto it = direction_overrides.find(spec.id); it != direction_overrides.end()) return it->second;
    return spec.default_direction;
}

namespace {

using Sample = std::pair<std::string, double>;  // participant, value
using Groups = std::vector<std::vector<Sample>>;

struct MeasurementKey {
    TaskRef task;
    std::string metric;
    std::string part;
    auto operator<=>(const MeasurementKey&) const = default;
};

class Collector {
public:
    Collector(const RawDatabase& rdb, const ScoringOptions& options) : rdb_(rdb), options_(options) {
        for (std::size_t i = 0; i < options.techniques.size(); ++i) index_[options.techniques[i]] = i;
        assignment_ = rdb.assignments();
        for (const auto& m : rdb.measurements) {
            if (!index_.count(m.technique)) continue;
            measurements_[{m.task, m.metric, m.part}].push_back(&m);
            involved_[m.task.scenario].insert(m.participant);
        }
        for (const auto& hr : rdb.heart_rates) {
            if (!technique_index(hr.participant)) continue;
            involved_[hr.scenario].insert(hr.participant);
        }
        for (const auto& [pid, q] : rdb.questionnaires) {
            if (!index_.count(q.technique)) continue;
            for (const auto& [s, answers] : q.after_scenario) involved_[s].insert(pid);
            if (q.sud) involved_[Scenario::S2].insert(pid);
            if (!q.post_test.empty() || q.post_ssq) overall_involved_.insert(pid);
        }
    }

    std::size_t group_count() const { return options_.techniques.size(); }

    Groups values(const MetricSpec& spec, const std::string& part) const {
        Groups g(group_count());
        if (spec.scope.is_task() && spec.kind != RequirementKind::SubjScenario) {
            const auto it = measurements_.find({spec.scope.task_ref(), spec.id, part});
            if (it != measurements_.end())
                for (const auto* m : it->second) g[index_.at(m->technique)].emplace_back(m->participant, m->value);
        } else if (spec.id == metric_ids::kSud) {
            for (const auto& [pid, q] : rdb_.questionnaires)
                if (q.sud && index_.count(q.technique)) g[index_.at(q.technique)].emplace_back(pid, *q.sud);
        } else if (spec.kind == RequirementKind::PE) {
            for (const auto& hr : rdb_.heart_rates) {
                if (hr.scenario != *spec.scope.scenario) continue;
                if (auto t = technique_index(hr.participant))
                    g[*t].emplace_back(hr.participant, physical_effort(hr.before, hr.after));
            }
        } else if (spec.kind == RequirementKind::SubjScenario) {
            for (const auto& [pid, q] : rdb_.questionnaires) {
                if (!index_.count(q.technique)) continue;
                const auto s = q.after_scenario.find(*spec.scope.scenario);
                if (s == q.after_scenario.end()) continue;
                const auto a = s->second.find(spec.id);
                if (a != s->second.end()) g[index_.at(q.technique)].emplace_back(pid, likert_metric(a->second));
            }
        } else if (spec.kind == RequirementKind::SubjOverall) {
            for (const auto& [pid, q] : rdb_.questionnaires) {
                if (!index_.count(q.technique)) continue;
                if (const auto v = overall_value(q, spec.id)) g[index_.at(q.technique)].emplace_back(pid, *v);
            }
        }
        for (auto& group : g) std::sort(group.begin(), group.end());
        return g;
    }

    /// Participants of technique `t` who took part in the metric's scenario (or in the post-test).
    std::vector<std::string> involved(const MetricSpec& spec, std::size_t t) const {
        const std::set<std::string>* pool = &overall_involved_;
        if (spec.scope.scenario) {
            const auto it = involved_.find(*spec.scope.scenario);
            if (it == involved_.end()) return {};
            pool = &it->second;
        }
        std::vector<std::string> out;
        for (const auto& pid : *pool)
            if (technique_index(pid) == t) out.push_back(pid);
        return out;
    }

private:
    std::optional<std::size_t> technique_index(const std::string& participant) const {
        const auto a = assignment_.find(participant);
        if (a == assignment_.end()) return std::nullopt;
        const auto t = index_.find(a->second);
        if (t == index_.end()) return std::nullopt;
        return t->second;
    }

    std::optional<double> overall_value(const QuestionnaireAnswers& q, const std::string& id) const {
        if (const auto it = q.post_test.find(id); it != q.post_test.end()) return likert_metric(it->second);
        const auto ssq = scored_ssq(q, options_.ssq_scoring);
        if (!ssq) return std::nullopt;
        if (id == metric_ids::kSsqNausea) return ssq->nausea;
        if (id == metric_ids::kSsqOculomotor) return ssq->oculomotor;
        if (id == metric_ids::kSsqDisorientation) return ssq->disorientation;
        if (id == metric_ids::kSsqTotal) return ssq->total;
        return std::nullopt;
    }

    const RawDatabase& rdb_;
    const ScoringOptions& options_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::string> assignment_;
    std::map<MeasurementKey, std::vector<const Measurement*>> measurements_;
    std::map<Scenario, std::set<std::string>> involved_;
    std::set<std::string> overall_involved_;
};

void fill_missing(Groups& groups, const Collector& collector, const MetricSpec& spec, MissingPolicy policy,
                  Direction direction) {
    if (policy == MissingPolicy::Discard) return;
    std::optional<double> worst;
    for (const auto& g : groups)
        for (const auto& [pid, v] : g)
            if (!worst || (direction == Direction::Positive ? v < *worst : v > *worst)) worst = v;
    for (std::size_t t = 0; t < groups.size(); ++t) {
        auto& g = groups[t];
        if (g.empty()) continue;
        double mean = 0.0;
        for (const auto& s : g) mean += s.second;
        mean /= static_cast<double>(g.size());
        const double fill = policy == MissingPolicy::MeanFill ? mean : *worst;
        std::set<std::string> present;
        for (const auto& s : g) present.insert(s.first);
        for (const auto& pid : collector.involved(spec, t))
            if (!present.count(pid)) g.emplace_back(pid, fill);
        std::sort(g.begin(), g.end());
    }
}

MetricResult test_unit(std::string key, const MetricSpec& spec, const std::string& part, Direction direction,
                       Groups groups, const ScoringOptions& options) {
    MetricResult r;
    r.key = std::move(key);
    r.metric_key = spec.key();
    r.part = part;
    r.direction = direction;
    GroupedSamples tested(groups.size());
    for (std::size_t t = 0; t < groups.size(); ++t) {
        std::vector<double> values;
        for (const auto& s : groups[t]) values.push_back(s.second);
        const auto split = zscore_filter(values, options.zscore_threshold);
        std::set<double> removed(split.removed.begin(), split.removed.end());
        for (const auto& [pid, v] : groups[t])
            if (removed.count(v)) r.outliers.push_back({options.techniques[t], pid, v});
        tested[t] = split.kept;
        r.sizes.push_back(split.kept.size());
        r.means.push_back(split.kept.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : std::accumulate(split.kept.begin(), split.kept.end(), 0.0) /
                                                   static_cast<double>(split.kept.size()));
    }
    r.points.points = zeros(options.techniques);
    for (std::size_t t = 0; t < tested.size(); ++t) {
        if (tested[t].size() < 2) {
            r.untestable = "technique " + options.techniques[t] + " has " + std::to_string(tested[t].size()) +
                           " value(s); at least 2 are required";
            return r;
        }
    }
    try {
        r.sig = compare_groups(tested, options.alpha, options.dunn_adjustment);
    } catch (const UntestableError& e) {
        r.untestable = e.what();
        return r;
    }
    r.points = assign_points(options.techniques, r.means, *r.sig, direction);
    return r;
}

struct Scored {
    PointVector points;
    bool significant = false;
};

}  // namespace

PointTable compute_points(const RawDatabase& rdb, const ScoringOptions& options, const MetricRegistry& registry) {
    if (options.techniques.size() < 2) throw SubsetError("at least 2 techniques are needed for a comparison");
    PointTable table;
    table.techniques = options.techniques;
    table.scenarios = rdb.fixed.scenarios_included;
    std::sort(table.scenarios.begin(), table.scenarios.end());
    const Collector collector(rdb, options);
    const auto zero = zeros(options.techniques);

    const auto run = [&](const MetricSpec& spec, const std::string& part, Direction dir) {
        auto groups = collector.values(spec, part);
        fill_missing(groups, collector, spec, rdb.fixed.missing_policy, dir);
        const auto key = part.empty() ? spec.key() : spec.key() + "." + part;
        table.results.push_back(test_unit(key, spec, part, dir, std::move(groups), options));
        const auto& r = table.results.back();
        table.points[r.key] = r.points.points;
        return Scored{r.points.points, r.any_significant()};
    };

    // A metric with parts scores each part separately and combines them like cumulative elements.
    const auto score_metric = [&](const MetricSpec& spec) {
        const auto dir = options.direction_for(spec);
        if (!spec.has_parts()) return run(spec, "", dir);
        std::vector<PointVector> parts;
        std::vector<bool> sig;
        for (const auto& p : spec.parts) {
            auto s = run(spec, p, dir);
            parts.push_back(std::move(s.points));
            sig.push_back(s.significant);
        }
        Scored out;
        out.points = cumulative_points(parts, sig);
        out.significant = std::find(sig.begin(), sig.end(), true) != sig.end();
        table.points[spec.key()] = out.points;
        return out;
    };

    for (const auto scenario : table.scenarios) {
        for (const auto& t : tasks_of(scenario))
            for (auto kind : {RequirementKind::OS, RequirementKind::AC, RequirementKind::EP})
                table.task_requirements[t][kind] = zero;
        table.physical_effort[scenario] = zero;

        std::map<std::string, Scored> elements;  // by "<scope>.<id>"
        for (const auto& spec : registry.all()) {
            if (spec.scope.scenario != scenario || spec.role == MetricRole::Input) continue;

            if (spec.aggregation.kind == Aggregation::Kind::Cumulative) {
                std::vector<PointVector> pts;
                std::vector<bool> sig;
                for (const auto& id : spec.aggregation.elements) {
                    const auto& e = elements.at(to_string(spec.scope) + "." + id);
                    pts.push_back(e.points);
                    sig.push_back(e.significant);
                }
                const auto combined = cumulative_points(pts, sig);
                table.points[spec.key()] = combined;
                add_scaled(table.task_requirements[spec.scope.task_ref()][spec.kind], combined, 1.0);
                continue;
            }

            if (spec.id == metric_ids::kStairsChoice) {
                const auto dir = options.direction_for(spec);
                table.stairs_st = run(spec, "", dir).points;
                MetricResult flipped = table.results.back();
                flipped.key = spec.key() + ".flipped";
                flipped.direction = flip(dir);
                if (flipped.sig) flipped.points = assign_points(options.techniques, flipped.means, *flipped.sig, flipped.direction);
                table.stairs_ra = flipped.points.points;
                table.points[flipped.key] = table.stairs_ra;
                table.results.push_back(std::move(flipped));
                continue;
            }

            auto scored = score_metric(spec);
            if (spec.role == MetricRole::Element) {
                elements[spec.key()] = std::move(scored);
            } else if (spec.id == metric_ids::kSud) {
                table.sud = scored.points;
            } else if (spec.kind == RequirementKind::PE) {
                table.physical_effort[scenario] = scored.points;
            } else if (spec.kind == RequirementKind::SubjScenario) {
                table.scenario_subjective[scenario][spec.id] = scored.points;
            } else if (spec.scope.is_task()) {
                add_scaled(table.task_requirements[spec.scope.task_ref()][spec.kind], scored.points, 1.0);
            }
        }
    }

    for (const auto& spec : registry.all()) {
        if (!spec.scope.is_overall()) continue;
        table.overall[spec.id] = score_metric(spec).points;
    }
    if (table.stairs_st.empty()) table.stairs_st = zero;
    if (table.stairs_ra.empty()) table.stairs_ra = zero;
    if (table.sud.empty()) table.sud = zero;
    return table;
}

// ---------------------------------------------------------------------------
// Weighted database
// ---------------------------------------------------------------------------

WeightedDatabase apply_weights(const PointTable& table, const WeightConfig& config) {
    WeightedDatabase w;
    w.config = config;
    w.table = table;
    const auto zero = zeros(table.techniques);
    const auto contribute = [&](std::string term, double weight, const PointVector& pts) {
        w.contributions.push_back({std::move(term), weight, pts});
    };
    const double w_os = config.nfr_weight("OS");
    const double w_ac = config.nfr_weight("AC");
    const double w_ep = config.nfr_weight("EP");
    const double w_pe = config.nfr_weight("PE");

    std::vector<PointVector> scenario_totals;
    bool has_s2 = false;
    for (const auto s : table.scenarios) {
        if (s == Scenario::S2) has_s2 = true;
        ScenarioScores sc;
        const double w_s = config.scenario_weight(s);
        std::map<std::string, double> subj_weights;
        const auto subj_it = table.scenario_subjective.find(s);
        const std::map<std::string, PointVector> no_points;
        const auto& subj_points = subj_it == table.scenario_subjective.end() ? no_points : subj_it->second;
        for (const auto& [id, pts] : subj_points) {
            subj_weights[id] = config.nfr_weight(id);
            contribute(to_string(s) + "." + id, w_s * subj_weights[id], pts);
        }
        sc.subjective = scenario_subjective_score(w_s, subj_weights, subj_points);
        add_scaled(sc.subjective, zero, 0.0);

        std::vector<PointVector> task_parts;
        sc.tasks = zero;
        for (const auto& t : tasks_of(s)) {
            const auto& req = table.task_requirements.at(t);
            const double w_t = config.task_weight(t);
            auto score = task_objective_score(w_t, w_os, w_ac, w_ep, req.at(RequirementKind::OS),
                                              req.at(RequirementKind::AC), req.at(RequirementKind::EP));
            add_scaled(score, zero, 0.0);
            const auto name = to_string(t);
            contribute(name + ".OS", w_t * w_os, req.at(RequirementKind::OS));
            contribute(name + ".AC", w_t * w_ac, req.at(RequirementKind::AC));
            contribute(name + ".EP", w_t * w_ep, req.at(RequirementKind::EP));
            add_scaled(sc.tasks, score, 1.0);
            w.task_scores[t] = score;
            task_parts.push_back(std::move(score));
        }
        const auto& pe = table.physical_effort.at(s);
        contribute(to_string(s) + ".PE", w_pe, pe);
        sc.physical_effort = zero;
        add_scaled(sc.physical_effort, pe, w_pe);
        sc.total = scenario_total(sc.subjective, task_parts, w_pe, pe);
        scenario_totals.push_back(sc.total);
        w.scenario_scores[s] = std::move(sc);
    }

    w.stairs = zero;
    w.fear = zero;
    if (has_s2) {
        const TaskRef stairs_task{Scenario::S2, 4};
        const TaskRef fear_task{Scenario::S2, 5};
        const double w_stairs = config.task_weight(stairs_task);
        const double w_fear = config.task_weight(fear_task);
        w.stairs = stairs_score(w_stairs, config.w_st, config.w_ra, table.stairs_st, table.stairs_ra);
        w.fear = fear_score(w_fear, config.w_sud, table.sud);
        add_scaled(w.stairs, zero, 0.0);
        add_scaled(w.fear, zero, 0.0);
        contribute("S2.T4.ST", w_stairs * config.w_st, table.stairs_st);
        contribute("S2.T4.RA", w_stairs * config.w_ra, table.stairs_ra);
        contribute("S2.T5.SUD", w_fear * config.w_sud, table.sud);
    }

    std::map<std::string, double> overall_weights;
    for (const auto& [id, pts] : table.overall) {
        overall_weights[id] = config.nfr_weight(id);
        contribute("overall." + id, overall_weights[id], pts);
    }
    w.overall = overall_subjective_score(overall_weights, table.overall);
    add_scaled(w.overall, zero, 0.0);

    w.total = total_score(w.overall, scenario_totals, w.stairs, w.fear);
    add_scaled(w.total, zero, 0.0);
    w.ranking = rank(w.total);
    return w;
}

WeightedDatabase build_wdb(const RawDatabase& rdb, const WeightConfig& config, const MetricRegistry& registry) {
    config.validate(registry);
    ScoringOptions options;
    if (config.technique_subset.empty()) {
        for (const auto& t : rdb.fixed.techniques) options.techniques.push_back(t.id);
    } else {
        std::vector<std::string> unknown;
        for (const auto& id : config.technique_subset)
            if (!rdb.fixed.has_technique(id)) unknown.push_back("technique_subset: unknown technique '" + id + "'");
        if (!unknown.empty()) throw ConfigError(std::move(unknown));
        for (const auto& t : rdb.fixed.techniques)
            if (std::find(config.technique_subset.begin(), config.technique_subset.end(), t.id) !=
                config.technique_subset.end())
                options.techniques.push_back(t.id);
    }
    if (options.techniques.size() < 2)
        throw SubsetError("technique subset has " + std::to_string(options.techniques.size()) +
                          " technique(s); at least 2 are required");
    options.alpha = config.alpha;
    options.dunn_adjustment = config.dunn_adjustment;
    options.zscore_threshold = config.zscore_threshold;
    options.ssq_scoring = config.ssq_scoring;
    options.direction_overrides = config.direction_overrides;

    auto wdb = apply_weights(compute_points(rdb, options, registry), config);
    wdb.fixed = rdb.fixed;
    return wdb;
}

std::vector<RankEntry> rank(const PointVector& totals) {
    std::vector<RankEntry> out;
    for (const auto& [t, s] : totals) out.push_back({t, s, false});
    std::stable_sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.technique < b.technique;
    });
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i].score == out[i + 1].score) {
            out[i].tied = true;
            out[i + 1].tied = true;
        }
    }
    return out;
}

std::vector<RankEntry> rank(const WeightedDatabase& wdb) { return rank(wdb.total); }

}  // namespace locoscore
