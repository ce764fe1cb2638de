#include "locoscore/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "locoscore/error.hpp"

namespace locoscore {

namespace {

void check_samples(std::span<const TrajectorySample> samples) {
    if (samples.size() < 2) throw Error("trajectory needs at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].path_dev >= 0.0))
            throw Error("negative path deviation at sample " + std::to_string(i));
        if (i > 0 && !(samples[i].t > samples[i - 1].t))
            throw Error("sample times must be strictly increasing (sample " + std::to_string(i) + ")");
    }
}

bool flag_of(const TrajectorySample& s, SampleFlag f) {
    switch (f) {
        case SampleFlag::LookingAtTarget: return s.looking_at_target;
        case SampleFlag::GazeUncoupled: return s.gaze_uncoupled;
        case SampleFlag::ArmsStretched: return s.arms_stretched;
    }
    return false;
}

}  // namespace

double st_path_dev(std::span<const TrajectorySample> samples) {
    check_samples(samples);
    double area = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        area += 0.5 * (a.path_dev + b.path_dev) * (b.t - a.t);
    }
    return area;
}

double nr_st_path_dev(double st_path_dev, double max_dist, double compl_time) {
    if (!(max_dist > 0.0)) throw Error("max_dist must be positive");
    if (!(compl_time > 0.0)) throw Error("compl_time must be positive");
    if (!(st_path_dev >= 0.0)) throw Error("STPathDev must be non-negative");
    return st_path_dev / (max_dist * compl_time);
}

double compound_accuracy(double rate, double nr_dev) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw Error("rate outside [0,1]");
    if (!(nr_dev >= 0.0)) throw Error("normalized deviation must be non-negative");
    return rate * (1.0 - std::min(nr_dev, 1.0));
}

double score_rate(int coins_collected) {
    if (coins_collected < 0 || coins_collected > kCoinsTotal)
        throw Error("coins collected outside [0," + std::to_string(kCoinsTotal) + "]");
    return static_cast<double>(coins_collected) / kCoinsTotal;
}

double physical_effort(double hr_before, double hr_after) {
    if (!(hr_before > 0.0) || !(hr_after > 0.0)) throw Error("heart-rate readings must be positive");
    return hr_after - hr_before;
}

double flagged_rate(std::span<const TrajectorySample> samples, SampleFlag flag) {
    check_samples(samples);
    double on = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (flag_of(samples[i - 1], flag)) on += samples[i].t - samples[i - 1].t;
    return on / (samples.back().t - samples.front().t);
}

std::optional<double> max_dist(const TaskRef& task) {
    if (task == TaskRef{Scenario::S2, 2}) return 7.0;
    if (task.scenario == Scenario::S3) return 5.0;
    return std::nullopt;
}

const char* compound_rate_id(CompoundFormula f) {
    switch (f) {
        case CompoundFormula::AccuracyBkw: return metric_ids::kLookAtRate;
        case CompoundFormula::AccuracyGazeUnc: return metric_ids::kGazeUncRate;
        case CompoundFormula::AccuracyStrc: return metric_ids::kStrcRate;
        case CompoundFormula::AccuracyHandsUnc: return metric_ids::kScoreRate;
        case CompoundFormula::None: break;
    }
    return "";
}

}  // namespace locoscore
