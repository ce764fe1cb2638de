#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace locoscore {

// ---------------------------------------------------------------------------
// Functional requirements: scenarios and their tasks.
// ---------------------------------------------------------------------------

enum class Scenario : std::uint8_t { S1 = 1, S2, S3, S4, S5 };

inline constexpr std::array<Scenario, 5> kAllScenarios{
    Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4, Scenario::S5};

/// Number of tasks defined for a scenario (4, 5, 3, 3, 3).
constexpr int task_count(Scenario s) {
    switch (s) {
        case Scenario::S1: return 4;
        case Scenario::S2: return 5;
        default: return 3;
    }
}

std::string to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view text);

struct TaskRef {
    Scenario scenario = Scenario::S1;
    int task = 1;  // 1-based, <= task_count(scenario)

    auto operator<=>(const TaskRef&) const = default;
};

std::string to_string(const TaskRef& t);  // "S2.T4"
/// Accepts "S2.T4"; nullopt when malformed or the task index is out of range.
std::optional<TaskRef> parse_task(std::string_view text);
std::vector<TaskRef> tasks_of(Scenario s);

/// Where a metric lives: per task, per scenario, or on the overall experience.
struct Scope {
    std::optional<Scenario> scenario;
    std::optional<int> task;

    static Scope overall() { return {}; }
    static Scope of(Scenario s) { return {s, std::nullopt}; }
    static Scope of(TaskRef t) { return {t.scenario, t.task}; }

    bool is_task() const { return scenario && task; }
    bool is_scenario() const { return scenario && !task; }
    bool is_overall() const { return !scenario; }
    TaskRef task_ref() const { return {*scenario, *task}; }

    auto operator<=>(const Scope&) const = default;
};

std::string to_string(const Scope& s);  // "S1.T2", "S3" or "overall"

// ---------------------------------------------------------------------------
// Non-functional requirements and metric descriptors.
// ---------------------------------------------------------------------------

enum class RequirementKind : std::uint8_t {
    OS,            // operation speed
    AC,            // accuracy
    EP,            // error-proneness
    OT,            // other (StairsChoice)
    PE,            // physical effort
    SubjScenario,  // after-scenario questionnaire (and SUD on S2.T5)
    SubjOverall,   // post-test questionnaire, SSQ
};

std::string to_string(RequirementKind k);

enum class Direction : std::uint8_t { Positive, Negative };

std::string to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);
inline Direction flip(Direction d) {
    return d == Direction::Positive ? Direction::Negative : Direction::Positive;
}

enum class CompoundFormula : std::uint8_t {
    None,
    AccuracyBkw,       // LookAtRate
    AccuracyGazeUnc,   // GazeUncRate
    AccuracyStrc,      // StrcRate
    AccuracyHandsUnc,  // ScoreRate
};

struct Aggregation {
    enum class Kind : std::uint8_t { Elementary, Cumulative, Compound };

    Kind kind = Kind::Elementary;
    std::vector<std::string> elements;            // Cumulative: element metric ids (same scope)
    CompoundFormula formula = CompoundFormula::None;  // Compound only

    bool operator==(const Aggregation&) const = default;
};

/// How a metric participates in scoring.
enum class MetricRole : std::uint8_t {
    Scored,   // produces the requirement score of its scope directly
    Element,  // contributes to a cumulative metric of the same scope
    Input,    // raw measurement feeding a compound metric; never scored itself
};

/// Admissible values of a per-participant measurement.
enum class ValueDomain : std::uint8_t {
    Duration,     // seconds, >= 0
    Count,        // non-negative integer
    Rate,         // [0,1]
    NonNegative,  // distances, m*s, degrees
    Binary,       // 0/1
    Likert,       // aggregated 1..5
    Ssq,          // derived SSQ score, >= 0
    Sud,          // 0..sud_max
    Delta,        // any real (heart-rate difference)
};

struct MetricSpec {
    std::string id;
    Scope scope;
    RequirementKind kind = RequirementKind::OS;
    Aggregation aggregation;
    MetricRole role = MetricRole::Scored;
    std::string unit;
    Direction default_direction = Direction::Negative;
    ValueDomain domain = ValueDomain::NonNegative;
    std::vector<std::string> parts;  // kept-separate sub-measurements (S1.T2, S5.T1)
    std::string label;

    /// Stable identifier: "<scope>.<id>", e.g. "S1.T1.ComplTime", "S3.PE", "overall.Presence".
    std::string key() const;
    bool has_parts() const { return !parts.empty(); }
};

/// Ordered, closed catalogue of every metric the testbed evaluates.
class MetricRegistry {
public:
    MetricRegistry() = default;
    explicit MetricRegistry(std::vector<MetricSpec> specs);

    const std::vector<MetricSpec>& all() const { return specs_; }
    const MetricSpec* find(const std::string& key) const;
    const MetricSpec* find(const Scope& scope, const std::string& id) const;
    const MetricSpec& at(const Scope& scope, const std::string& id) const;

    std::vector<const MetricSpec*> in_scope(const Scope& scope) const;
    /// Every distinct task referenced by the registry, in scenario/task order.
    std::vector<TaskRef> tasks() const;

private:
    std::vector<MetricSpec> specs_;
    std::map<std::string, std::size_t> by_key_;
};

/// The built-in registry: every per-task objective metric, one physical-effort metric
/// per scenario, the after-scenario and post-test subjective metrics, SUD and SSQ.
const MetricRegistry& builtin_registry();

// Metric identifiers that other modules refer to by name.
namespace metric_ids {
inline constexpr const char* kComplTime = "ComplTime";
inline constexpr const char* kStPathDev = "STPathDev";
inline constexpr const char* kStairsChoice = "StairsChoice";
inline constexpr const char* kAvoidance = "Avoidance";
inline constexpr const char* kPhysicalEffort = "PE";
inline constexpr const char* kSud = "SUD";
inline constexpr const char* kLookAtRate = "LookAtRate";
inline constexpr const char* kGazeUncRate = "GazeUncRate";
inline constexpr const char* kStrcRate = "StrcRate";
inline constexpr const char* kScore = "Score";
inline constexpr const char* kScoreRate = "ScoreRate";
inline constexpr const char* kSsqNausea = "SSQ_Nausea";
inline constexpr const char* kSsqOculomotor = "SSQ_Oculomotor";
inline constexpr const char* kSsqDisorientation = "SSQ_Disorientation";
inline constexpr const char* kSsqTotal = "SSQ_Total";
}  // namespace metric_ids

/// After-scenario subjective metric ids, in questionnaire order.
const std::vector<std::string>& scenario_subjective_ids();
/// Post-test metric ids excluding SSQ.
const std::vector<std::string>& overall_subjective_ids();
/// SSQ ids: Nausea, Oculomotor, Disorientation, Total.
const std::vector<std::string>& ssq_ids();

}  // namespace locoscore
