#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locoscore/rdb.hpp"
#include "locoscore/trajectory.hpp"

namespace locoscore {

/// One line of a session log: `participant,technique,scenario,task,metric,part,value`.
struct LogRecord {
    std::string participant;
    std::string technique;
    TaskRef task;
    std::string metric;
    std::string part;
    double value = 0.0;  // StairsChoice tokens decoded: "ST" -> 1, "SL" -> 0
    std::size_t line = 0;

    bool operator==(const LogRecord&) const = default;
};

inline constexpr const char* kLogHeader = "participant,technique,scenario,task,metric,part,value";

/// Parses a log stream. Blank lines and a leading canonical header are skipped; any other
/// malformed line raises ParseError naming `source`, the line and the offending field.
std::vector<LogRecord> parse_logs(std::istream& in, const std::string& source = {},
                                  const MetricRegistry& registry = builtin_registry());

/// Mean of the six per-target values logged for S2.T1.
double average_over_targets(std::span<const double> values);

/// Trajectory of one participant on one task.
struct TrajectoryRecord {
    std::string participant;
    std::string technique;
    TaskRef task;
    std::vector<TrajectorySample> samples;
};

inline constexpr const char* kTrajectoryHeader =
    "participant,technique,scenario,task,t,path_dev,looking_at_target,gaze_uncoupled,arms_stretched";

std::vector<TrajectoryRecord> parse_trajectories(std::istream& in, const std::string& source = {});

inline constexpr const char* kHeartRateHeader = "participant,scenario,before,after";

std::vector<HeartRatePair> parse_heart_rates(std::istream& in, const std::string& source = {});

/// Study-level settings supplied alongside the data.
struct StudyConfig {
    std::vector<TechniqueInfo> techniques;       // empty: derive from the data
    std::vector<Scenario> scenarios_included;    // empty: derive from the data
    MissingPolicy missing_policy = MissingPolicy::Discard;
    nlohmann::json calibration = nlohmann::json::object();

    static StudyConfig from_json(const nlohmann::json& j);
};

/// Builds the RDB: averages S2.T1 targets, keeps S1.T2 / S5.T1 parts separate, derives
/// trajectory metrics and compound accuracies where they were not logged, and checks that
/// every participant has a heart-rate pair for each scenario they took part in.
RawDatabase assemble_rdb(std::span<const LogRecord> records,
                         std::span<const QuestionnaireAnswers> questionnaires,
                         std::span<const HeartRatePair> heart_rates, const StudyConfig& study,
                         std::span<const TrajectoryRecord> trajectories = {});

/// Keeps only participants whose demographics satisfy every constraint.
RawDatabase filter_demographics(const RawDatabase& rdb,
                                std::span<const DemographicConstraint> constraints);

/// Reads a log directory (logs, `*.traj.csv`, `*.hr.csv`, calibration `*.json`) and a
/// questionnaire directory (`*.json`), then assembles the RDB.
RawDatabase ingest_directories(const std::filesystem::path& log_dir,
                               const std::filesystem::path& questionnaire_dir,
                               const StudyConfig& study = {},
                               const QuestionMap& map = QuestionMap::defaults());

}  // namespace locoscore
