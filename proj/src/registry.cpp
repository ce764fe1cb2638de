#include "locoscore/model.hpp"

#include <algorithm>
#include <set>

#include "locoscore/error.hpp"

namespace locoscore {

std::string to_string(Scenario s) { return "S" + std::to_string(static_cast<int>(s)); }

std::optional<Scenario> parse_scenario(std::string_view text) {
    if (text.size() != 2 || text[0] != 'S') return std::nullopt;
    const int n = text[1] - '0';
    if (n < 1 || n > 5) return std::nullopt;
    return static_cast<Scenario>(n);
}

std::string to_string(const TaskRef& t) {
    return to_string(t.scenario) + ".T" + std::to_string(t.task);
}

std::optional<TaskRef> parse_task(std::string_view text) {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    const auto scenario = parse_scenario(text.substr(0, dot));
    const auto rest = text.substr(dot + 1);
    if (!scenario || rest.size() != 2 || rest[0] != 'T') return std::nullopt;
    const int task = rest[1] - '0';
    if (task < 1 || task > task_count(*scenario)) return std::nullopt;
    return TaskRef{*scenario, task};
}

std::vector<TaskRef> tasks_of(Scenario s) {
    std::vector<TaskRef> out;
    for (int t = 1; t <= task_count(s); ++t) out.push_back({s, t});
    return out;
}

std::string to_string(const Scope& s) {
    if (s.is_overall()) return "overall";
    if (s.is_task()) return to_string(s.task_ref());
    return to_string(*s.scenario);
}

std::string to_string(RequirementKind k) {
    switch (k) {
        case RequirementKind::OS: return "OS";
        case RequirementKind::AC: return "AC";
        case RequirementKind::EP: return "EP";
        case RequirementKind::OT: return "OT";
        case RequirementKind::PE: return "PE";
        case RequirementKind::SubjScenario: return "SUBJ_SCENARIO";
        case RequirementKind::SubjOverall: return "SUBJ_OVERALL";
    }
    return "?";
}

std::string to_string(Direction d) { return d == Direction::Positive ? "positive" : "negative"; }

std::optional<Direction> parse_direction(std::string_view text) {
    if (text == "positive") return Direction::Positive;
    if (text == "negative") return Direction::Negative;
    return std::nullopt;
}

std::string MetricSpec::key() const { return to_string(scope) + "." + id; }

MetricRegistry::MetricRegistry(std::vector<MetricSpec> specs) : specs_(std::move(specs)) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const auto [it, inserted] = by_key_.emplace(specs_[i].key(), i);
        if (!inserted) throw Error("duplicate metric in registry: " + it->first);
    }
}

const MetricSpec* MetricRegistry::find(const std::string& key) const {
    const auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : &specs_[it->second];
}

const MetricSpec* MetricRegistry::find(const Scope& scope, const std::string& id) const {
    return find(to_string(scope) + "." + id);
}

const MetricSpec& MetricRegistry::at(const Scope& scope, const std::string& id) const {
    const auto* spec = find(scope, id);
    if (spec == nullptr) throw Error("unknown metric: " + to_string(scope) + "." + id);
    return *spec;
}

std::vector<const MetricSpec*> MetricRegistry::in_scope(const Scope& scope) const {
    std::vector<const MetricSpec*> out;
    for (const auto& s : specs_)
        if (s.scope == scope) out.push_back(&s);
    return out;
}

std::vector<TaskRef> MetricRegistry::tasks() const {
    std::set<TaskRef> seen;
    for (const auto& s : specs_)
        if (s.scope.is_task()) seen.insert(s.scope.task_ref());
    return {seen.begin(), seen.end()};
}

const std::vector<std::string>& scenario_subjective_ids() {
    static const std::vector<std::string> ids{
        "InputSensitivity", "InputResponsiveness", "EaseOfUse",   "PerceivedErrors",
        "Appropriateness",  "Satisfaction",        "MentalEffort", "PerceivedPhysicalEffort",
        "Naturalness",      "PhysicalStrainSimilarity"};
    return ids;
}

const std::vector<std::string>& overall_subjective_ids() {
    static const std::vector<std::string> ids{
        "SelfMotionCompellingness", "Acclimatisation", "Control",
        "Presence",                 "Learnability",    "Intuitiveness",
        "Comfort",                  "Enjoyability",    "OverallSystemUsability"};
    return ids;
}

const std::vector<std::string>& ssq_ids() {
    static const std::vector<std::string> ids{metric_ids::kSsqNausea, metric_ids::kSsqOculomotor,
                                              metric_ids::kSsqDisorientation,
                                              metric_ids::kSsqTotal};
    return ids;
}

namespace {

using Kind = RequirementKind;
using Dom = ValueDomain;
constexpr auto Pos = Direction::Positive;
constexpr auto Neg = Direction::Negative;

const std::vector<std::string> kTargetSizes{"large", "medium", "small"};
const std::vector<std::string> kGrabParts{"p1", "p2", "p3"};

class Builder {
public:
    explicit Builder(TaskRef task) : scope_(Scope::of(task)) {}
    explicit Builder(Scope scope) : scope_(scope) {}

    Builder& parts(std::vector<std::string> p) {
        parts_ = std::move(p);
        return *this;
    }

    Builder& metric(std::string id, Kind kind, std::string unit, Direction dir, Dom dom,
                    std::string label, MetricRole role = MetricRole::Scored) {
        MetricSpec s;
        s.id = std::move(id);
        s.scope = scope_;
        s.kind = kind;
        s.unit = std::move(unit);
        s.default_direction = dir;
        s.domain = dom;
        s.label = std::move(label);
        s.role = role;
        s.parts = parts_;
        out_.push_back(std::move(s));
        return *this;
    }

    Builder& compl_time() {
        return metric(metric_ids::kComplTime, Kind::OS, "s", Neg, Dom::Duration,
                      "task completion time");
    }

    Builder& element(std::string id, Kind kind, std::string unit, Direction dir, Dom dom,
                     std::string label) {
        return metric(std::move(id), kind, std::move(unit), dir, dom, std::move(label),
                      MetricRole::Element);
    }

    Builder& input(std::string id, std::string unit, Dom dom, std::string label) {
        return metric(std::move(id), Kind::AC, std::move(unit), Pos, dom, std::move(label),
                      MetricRole::Input);
    }

    /// Groups the preceding elements of `kind` into a cumulative metric named after the kind.
    Builder& cumulative(Kind kind, Direction dir, std::string unit) {
        MetricSpec s;
        s.id = to_string(kind);
        s.scope = scope_;
        s.kind = kind;
        s.aggregation.kind = Aggregation::Kind::Cumulative;
        for (const auto& e : out_)
            if (e.role == MetricRole::Element && e.kind == kind) s.aggregation.elements.push_back(e.id);
        s.unit = std::move(unit);
        s.default_direction = dir;
        s.label = "cumulative " + to_string(kind);
        out_.push_back(std::move(s));
        return *this;
    }

    Builder& compound(std::string id, CompoundFormula f, std::string label) {
        metric(std::move(id), Kind::AC, "fraction", Pos, Dom::Rate, std::move(label));
        out_.back().aggregation.kind = Aggregation::Kind::Compound;
        out_.back().aggregation.formula = f;
        return *this;
    }

    void into(std::vector<MetricSpec>& all) {
        for (auto& s : out_) all.push_back(std::move(s));
    }

private:
    Scope scope_;
    std::vector<std::string> parts_;
    std::vector<MetricSpec> out_;
};

std::vector<MetricSpec> make_builtin() {
    using S = Scenario;
    std::vector<MetricSpec> all;
    const auto count = [](Builder& b, const char* id, const char* label) -> Builder& {
        return b.metric(id, Kind::EP, "count", Neg, Dom::Count, label);
    };

    // S1. Straight movements
    {
        Builder b(TaskRef{S::S1, 1});
        b.compl_time().metric(metric_ids::kStPathDev, Kind::AC, "m*s", Neg, Dom::NonNegative,
                              "spatio-temporal path deviation");
        count(b, "NumWallColl", "collisions with corridor walls").into(all);
    }
    {
        Builder b(TaskRef{S::S1, 2});
        b.parts(kTargetSizes).compl_time().metric("TargetDist", Kind::AC, "m", Neg, Dom::NonNegative,
                                                  "final distance from target centre");
        count(b, "NumExits", "exits from the target destination").into(all);
    }
    {
        Builder b(TaskRef{S::S1, 3});
        b.element("InsideTargetRate", Kind::AC, "fraction", Pos, Dom::Rate,
                  "time fraction inside the reference area")
            .element("AvgDist", Kind::AC, "m", Neg, Dom::NonNegative,
                     "average distance from the reference area centre")
            .cumulative(Kind::AC, Pos, "points");
        count(b, "NumInterr", "walking interruptions").into(all);
    }
    {
        Builder b(TaskRef{S::S1, 4});
        b.compl_time();
        count(b, "NumWallColl", "collisions with corridor walls").into(all);
    }

    // S2. Direction control
    {
        Builder b(TaskRef{S::S2, 1});
        b.compl_time()
            .element("InitAngErr", Kind::AC, "deg", Neg, Dom::NonNegative, "initial angular error")
            .element("EstPathLen", Kind::AC, "m", Neg, Dom::NonNegative, "distance travelled to target")
            .element("RecallTime", Kind::AC, "s", Neg, Dom::Duration, "time to pick the new direction")
            .cumulative(Kind::AC, Pos, "points")
            .into(all);
    }
    {
        Builder b(TaskRef{S::S2, 2});
        b.compl_time()
            .compound("AccuracyBkw", CompoundFormula::AccuracyBkw, "backward-walking accuracy")
            .input(metric_ids::kStPathDev, "m*s", Dom::NonNegative, "spatio-temporal path deviation")
            .input(metric_ids::kLookAtRate, "fraction", Dom::Rate, "time fraction looking at target");
        count(b, "NumLookOut", "gaze turned away from target").into(all);
    }
    {
        Builder b(TaskRef{S::S2, 3});
        b.compl_time();
        count(b, "NumInterr", "walking interruptions").into(all);
    }
    {
        Builder b(TaskRef{S::S2, 4});
        b.metric(metric_ids::kStairsChoice, Kind::OT, "0/1", Pos, Dom::Binary,
                 "choice between ramp (0) and stairs (1)")
            .into(all);
    }
    {
        Builder b(TaskRef{S::S2, 5});
        b.compl_time().metric(metric_ids::kAvoidance, Kind::AC, "m*s", Pos, Dom::NonNegative,
                              "deviation integral from the drop edge");
        count(b, "NumFalls", "falls from the roof");
        b.metric(metric_ids::kSud, Kind::SubjScenario, "SUD", Neg, Dom::Sud,
                 "subjective units of discomfort")
            .into(all);
    }

    // S3. Decoupled movements
    const auto s3 = [&](int task, const char* id, CompoundFormula f, const char* rate,
                        Dom rate_dom, const char* label) {
        Builder b(TaskRef{S::S3, task});
        b.compl_time()
            .compound(id, f, label)
            .input(metric_ids::kStPathDev, "m*s", Dom::NonNegative, "spatio-temporal path deviation")
            .input(rate, rate_dom == Dom::Count ? "coins" : "fraction", rate_dom, "compound rate input");
        if (f == CompoundFormula::AccuracyHandsUnc)
            b.input(metric_ids::kScoreRate, "fraction", Dom::Rate, "collected coin fraction");
        count(b, "NumInterr", "walking interruptions").into(all);
    };
    s3(1, "AccuracyGazeUnc", CompoundFormula::AccuracyGazeUnc, metric_ids::kGazeUncRate, Dom::Rate,
       "decoupled-gaze accuracy");
    s3(2, "AccuracyStrc", CompoundFormula::AccuracyStrc, metric_ids::kStrcRate, Dom::Rate,
       "stretched-hands accuracy");
    s3(3, "AccuracyHandsUnc", CompoundFormula::AccuracyHandsUnc, metric_ids::kScore, Dom::Count,
       "decoupled-hands accuracy");

    // S4. Agility
    {
        Builder b(TaskRef{S::S4, 1});
        b.compl_time();
        count(b, "NumObsColl", "collisions with moving blocks").into(all);
    }
    for (int task : {2, 3}) {
        Builder b(TaskRef{S::S4, task});
        count(b, "NumHits", "hits by a bullet").into(all);
    }

    // S5. Interaction with objects
    {
        Builder b(TaskRef{S::S5, 1});
        b.parts(kGrabParts)
            .compl_time()
            .element("NumItemFalls", Kind::EP, "count", Neg, Dom::Count, "grabbed objects dropped")
            .element("NumBodyColl", Kind::EP, "count", Neg, Dom::Count, "body collisions in the maze")
            .element("NumItemColl", Kind::EP, "count", Neg, Dom::Count, "item collisions in the maze");
        b.parts({}).cumulative(Kind::EP, Pos, "points").into(all);
    }
    {
        Builder b(TaskRef{S::S5, 2});
        b.compl_time()
            .element("AvgSetupAcc", Kind::AC, "fraction", Pos, Dom::Rate, "setup placement accuracy")
            .element("AvgTowerAcc", Kind::AC, "fraction", Pos, Dom::Rate, "assembly placement accuracy")
            .cumulative(Kind::AC, Pos, "points")
            .into(all);
    }
    {
        Builder b(TaskRef{S::S5, 3});
        b.compl_time().metric("CloseToTargetRage", Kind::AC, "fraction", Pos, Dom::Rate,
                              "time fraction close to the moving robot");
        count(b, "NumErrors", "wrong-order interactions and drops").into(all);
    }

    // Per-scenario: physical effort and after-scenario questionnaire.
    static const std::set<std::string> negative_subjective{"PerceivedErrors", "MentalEffort",
                                                           "PerceivedPhysicalEffort"};
    for (const auto s : kAllScenarios) {
        Builder b(Scope::of(s));
        b.metric(metric_ids::kPhysicalEffort, Kind::PE, "bpm", Neg, Dom::Delta,
                 "heart-rate change across the scenario");
        for (const auto& id : scenario_subjective_ids())
            b.metric(id, Kind::SubjScenario, "likert", negative_subjective.count(id) ? Neg : Pos,
                     Dom::Likert, id);
        b.into(all);
    }

    // Overall: post-test questionnaire and SSQ.
    {
        Builder b(Scope::overall());
        for (const auto& id : overall_subjective_ids())
            b.metric(id, Kind::SubjOverall, "likert", Pos, Dom::Likert, id);
        for (const auto& id : ssq_ids()) b.metric(id, Kind::SubjOverall, "SSQ", Neg, Dom::Ssq, id);
        b.into(all);
    }
    return all;
}

}  // namespace

const MetricRegistry& builtin_registry() {
    static const MetricRegistry registry(make_builtin());
    return registry;
}

}  // namespace locoscore
