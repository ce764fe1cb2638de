#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locoscore/model.hpp"
#include "locoscore/rdb.hpp"
#include "locoscore/stats.hpp"
#include "locoscore/weights.hpp"

namespace locoscore {

/// Points per technique. Techniques that earned nothing are present with 0.
using PointVector = std::map<std::string, double>;

using TechniquePair = std::pair<std::string, std::string>;

struct PointAssignment {
    PointVector points;
    int significant_pairs = 0;
    std::vector<TechniquePair> ties;  // significant pairs whose means are equal; no point awarded
};

/// One point per pair with p <= alpha, to the technique with the better mean.
/// `techniques` and `means` follow the group order of `sig`.
PointAssignment assign_points(std::span<const std::string> techniques, std::span<const double> means,
                              const SignificanceResult& sig, Direction direction);

/// Sum of element points divided by the number of elements that had at least one
/// significant pair. All zeros when no element had one.
PointVector cumulative_points(std::span<const PointVector> elements, const std::vector<bool>& had_significance);

PointVector task_objective_score(double w_task, double w_os, double w_ac, double w_ep, const PointVector& s_os,
                                 const PointVector& s_ac, const PointVector& s_ep);
/// Throws ConfigError unless (w_st, w_ra) is (0,0), (0,1) or (1,0).
PointVector stairs_score(double w_task, double w_st, double w_ra, const PointVector& s_st, const PointVector& s_ra);
PointVector fear_score(double w_task, double w_sud, const PointVector& s_sud);
PointVector scenario_subjective_score(double w_scenario, const std::map<std::string, double>& metric_weights,
                                      const std::map<std::string, PointVector>& metric_points);
PointVector scenario_total(const PointVector& subjective, std::span<const PointVector> task_parts, double w_pe,
                           const PointVector& s_pe);
/// Throws ConfigError when both an SSQ subscale and the SSQ total carry weight.
PointVector overall_subjective_score(const std::map<std::string, double>& weights,
                                     const std::map<std::string, PointVector>& points);
PointVector total_score(const PointVector& overall, std::span<const PointVector> scenario_totals,
                        const PointVector& stairs, const PointVector& fear);

// ---------------------------------------------------------------------------
// Weight-free point table
// ---------------------------------------------------------------------------

struct OutlierRecord {
    std::string technique;
    std::string participant;
    double value = 0.0;
};

/// Statistics and points of one compared quantity (a metric, or one part of it).
struct MetricResult {
    std::string key;         // "S1.T1.ComplTime", "S1.T2.ComplTime.large", "S2.T4.StairsChoice.flipped"
    std::string metric_key;  // registry key
    std::string part;
    Direction direction = Direction::Negative;
    std::vector<double> means;      // per compared technique, NaN when the group is empty
    std::vector<std::size_t> sizes;  // values tested per technique, after outlier removal
    std::optional<SignificanceResult> sig;
    std::string untestable;  // reason; empty when tested
    PointAssignment points;
    std::vector<OutlierRecord> outliers;

    bool any_significant() const { return points.significant_pairs > 0; }
};

struct ScoringOptions {
    std::vector<std::string> techniques;  // compared, in RDB order
    double alpha = 0.05;
    Adjustment dunn_adjustment = Adjustment::None;
    double zscore_threshold = 3.0;
    SsqMode ssq_scoring = SsqMode::PostOnly;
    std::map<std::string, Direction> direction_overrides;

    Direction direction_for(const MetricSpec& spec) const;
};

/// Everything that does not depend on weights: per-metric statistics and points.
struct PointTable {
    std::vector<std::string> techniques;
    std::vector<Scenario> scenarios;
    std::vector<MetricResult> results;
    std::map<std::string, PointVector> points;  // every tested unit and every aggregated metric
    std::map<TaskRef, std::map<RequirementKind, PointVector>> task_requirements;  // OS / AC / EP
    PointVector stairs_st;
    PointVector stairs_ra;
    PointVector sud;
    std::map<Scenario, PointVector> physical_effort;
    std::map<Scenario, std::map<std::string, PointVector>> scenario_subjective;
    std::map<std::string, PointVector> overall;  // post-test metrics and SSQ
};

/// Compares the configured techniques on every metric of the included scenarios.
PointTable compute_points(const RawDatabase& rdb, const ScoringOptions& options,
                          const MetricRegistry& registry = builtin_registry());

// ---------------------------------------------------------------------------
// Weighted database
// ---------------------------------------------------------------------------

/// One weighted term of the total: total = sum over terms of weight * points.
struct Contribution {
    std::string term;  // "S1.T1.OS", "S3.PE", "S2.Satisfaction", "S2.T4.ST", "overall.Presence"
    double weight = 0.0;
    PointVector points;
};

struct RankEntry {
    std::string technique;
    double score = 0.0;
    bool tied = false;
};

struct ScenarioScores {
    PointVector subjective;
    PointVector tasks;  // sum of the weighted per-task objective scores
    PointVector physical_effort;
    PointVector total;
};

struct WeightedDatabase {
    FixedPart fixed;
    WeightConfig config;
    PointTable table;
    std::map<TaskRef, PointVector> task_scores;
    std::map<Scenario, ScenarioScores> scenario_scores;
    PointVector stairs;
    PointVector fear;
    PointVector overall;
    PointVector total;
    std::vector<Contribution> contributions;
    std::vector<RankEntry> ranking;
};

/// Applies the weighted sum model to a point table.
WeightedDatabase apply_weights(const PointTable& table, const WeightConfig& config);

/// Restricts the RDB to the configured technique subset, recomputes every statistic on it
/// and applies the weights. Throws SubsetError when fewer than two techniques remain and
/// ConfigError for an invalid configuration or unknown technique.
WeightedDatabase build_wdb(const RawDatabase& rdb, const WeightConfig& config,
                           const MetricRegistry& registry = builtin_registry());

/// Descending by total; exact ties are flagged and ordered by technique id.
std::vector<RankEntry> rank(const PointVector& totals);
std::vector<RankEntry> rank(const WeightedDatabase& wdb);

nlohmann::json to_json(const WeightedDatabase& wdb);
/// Serialized WDB document. The CLI and the HTTP service both emit exactly these bytes.
std::string serialize_wdb(const WeightedDatabase& wdb);

}  // namespace locoscore
