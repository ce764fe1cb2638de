#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locoscore/model.hpp"
#include "locoscore/questionnaire.hpp"

namespace locoscore {

struct TechniqueInfo {
    std::string id;
    std::string label;

    bool operator==(const TechniqueInfo&) const = default;
};

/// How absent per-participant values are treated when a metric is scored.
enum class MissingPolicy { Discard, MeanFill, WorstFill };

std::string to_string(MissingPolicy p);
std::optional<MissingPolicy> parse_missing_policy(std::string_view text);

/// `key op value`, op one of == != < <= > >=. Numbers compare numerically,
/// strings support == and != only.
struct DemographicConstraint {
    std::string key;
    std::string op;
    nlohmann::json value;

    bool matches(const nlohmann::json& actual) const;
    bool operator==(const DemographicConstraint&) const = default;
};

/// Parses "vr_experience <= 2" or "gender == f".
DemographicConstraint parse_constraint(std::string_view text);

/// The study's fixed configuration.
struct FixedPart {
    std::vector<TechniqueInfo> techniques;
    std::vector<Scenario> scenarios_included;
    std::vector<DemographicConstraint> demographic_constraints;
    MissingPolicy missing_policy = MissingPolicy::Discard;
    nlohmann::json calibration = nlohmann::json::object();  // stored verbatim, unused by scoring

    bool includes(Scenario s) const;
    bool has_technique(const std::string& id) const;
    bool operator==(const FixedPart&) const = default;
};

/// One per-participant value of a task metric. `part` is empty unless the metric has parts.
struct Measurement {
    std::string participant;
    std::string technique;
    TaskRef task;
    std::string metric;
    std::string part;
    double value = 0.0;

    bool operator==(const Measurement&) const = default;
};

struct HeartRatePair {
    std::string participant;
    Scenario scenario = Scenario::S1;
    double before = 0.0;
    double after = 0.0;

    bool operator==(const HeartRatePair&) const = default;
};

/// Raw Database: fixed study configuration plus every participant's data.
struct RawDatabase {
    FixedPart fixed;
    std::vector<Measurement> measurements;
    std::map<std::string, QuestionnaireAnswers> questionnaires;  // by participant
    std::vector<HeartRatePair> heart_rates;

    /// Participant id -> technique, from measurements and questionnaires. First assignment wins;
    /// conflicting assignments are reported by validate_rdb.
    std::map<std::string, std::string> assignments() const;
    std::vector<std::string> participants() const;
    /// Canonical ordering so that equal content compares and serializes identically.
    void normalize();

    bool operator==(const RawDatabase&) const = default;
};

nlohmann::json to_json(const FixedPart& fixed);
nlohmann::json to_json(const RawDatabase& rdb);
RawDatabase rdb_from_json(const nlohmann::json& doc, const QuestionMap& map = QuestionMap::defaults());

void save_rdb(const RawDatabase& rdb, const std::filesystem::path& path);
RawDatabase load_rdb(const std::filesystem::path& path);

/// Every structural and domain violation in `rdb`. Empty means valid.
std::vector<std::string> validate_rdb(const RawDatabase& rdb,
                                      const MetricRegistry& registry = builtin_registry());

/// Checks a single value against its metric's domain; returns an empty string when valid.
std::string domain_violation(const MetricSpec& spec, double value, double sud_max = 100.0);

}  // namespace locoscore
