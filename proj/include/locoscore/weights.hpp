#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locoscore/model.hpp"
#include "locoscore/questionnaire.hpp"
#include "locoscore/stats.hpp"

namespace locoscore {

enum class FrGranularity { PerScenario, PerTask };

/// Which side of the SSQ carries weight: the three subscales or the total.
enum class SsqWeighting { Total, Components };

std::string to_string(FrGranularity g);
std::string to_string(SsqWeighting w);

/// Variable part of a scoring run. Weights not listed default to 1.
struct WeightConfig {
    FrGranularity fr_granularity = FrGranularity::PerScenario;
    std::map<std::string, double> fr_weights;   // "S1" (per-scenario) or "S1.T2" (per-task)
    std::map<std::string, double> nfr_weights;  // "OS", "AC", "EP", "PE", subjective and SSQ ids
    SsqWeighting ssq_mode = SsqWeighting::Total;
    double w_st = 1.0;
    double w_ra = 0.0;
    double w_sud = 1.0;
    double alpha = 0.05;
    std::vector<std::string> technique_subset;  // empty: every technique in the RDB
    std::map<std::string, Direction> direction_overrides;  // full metric key or bare metric id
    SsqMode ssq_scoring = SsqMode::PostOnly;
    Adjustment dunn_adjustment = Adjustment::None;
    double zscore_threshold = 3.0;

    /// Every rule the configuration breaks, in a stable order. Empty means valid.
    std::vector<std::string> violations(const MetricRegistry& registry = builtin_registry()) const;
    /// Throws ConfigError listing all violations.
    void validate(const MetricRegistry& registry = builtin_registry()) const;

    /// Fine FR weight of a task. Per-scenario configs hand the scenario weight to each task.
    double task_weight(const TaskRef& t) const;
    /// Coarse FR weight. Per-task configs average the weights of the scenario's tasks.
    double scenario_weight(Scenario s) const;
    /// Effective NFR weight, after resolving the SSQ total/components switch.
    double nfr_weight(const std::string& id) const;

    Direction direction_for(const MetricSpec& spec) const;

    bool operator==(const WeightConfig&) const = default;
};

/// Parses a configuration document. Unknown keys and every value error are collected
/// and raised together as a ConfigError.
WeightConfig weight_config_from_json(const nlohmann::json& doc,
                                     const MetricRegistry& registry = builtin_registry());
nlohmann::json to_json(const WeightConfig& c);

/// Keys accepted in `nfr_weights`.
const std::vector<std::string>& nfr_weight_keys();

}  // namespace locoscore
