#pragma once

#include <optional>
#include <span>

#include "locoscore/model.hpp"

namespace locoscore {

/// One trajectory observation, `t` seconds after task start.
struct TrajectorySample {
    double t = 0.0;
    double path_dev = 0.0;  // metres from the target path (or drop edge)
    bool looking_at_target = false;
    bool gaze_uncoupled = false;
    bool arms_stretched = false;

    bool operator==(const TrajectorySample&) const = default;
};

enum class SampleFlag { LookingAtTarget, GazeUncoupled, ArmsStretched };

inline constexpr int kCoinsTotal = 50;

/// Time integral of the path deviation (trapezoidal), in m*s. Requires >= 2 samples
/// with strictly increasing `t` and non-negative deviations.
double st_path_dev(std::span<const TrajectorySample> samples);

/// STPathDev / (max_dist * compl_time). Throws if either denominator term is <= 0.
double nr_st_path_dev(double st_path_dev, double max_dist, double compl_time);

/// rate * (1 - min(nr_dev, 1)). Shared by AccuracyBkw/GazeUnc/Strc/HandsUnc.
double compound_accuracy(double rate, double nr_dev);

/// Collected coins over the 50 available.
double score_rate(int coins_collected);

/// Heart-rate difference (after - before) in bpm. Both readings must be positive.
double physical_effort(double hr_before, double hr_after);

/// Time-weighted fraction of the task during which `flag` held. Each interval
/// [t_i, t_{i+1}) takes the flag of its left sample.
double flagged_rate(std::span<const TrajectorySample> samples, SampleFlag flag);

/// Lateral room available for the compound accuracies: 7 m on S2.T2, 5 m on S3.T1-T3.
std::optional<double> max_dist(const TaskRef& task);

/// The rate input that feeds a compound formula.
const char* compound_rate_id(CompoundFormula f);

}  // namespace locoscore
