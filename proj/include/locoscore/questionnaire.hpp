#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locoscore/model.hpp"

namespace locoscore {

inline constexpr std::size_t kSsqItems = 16;

/// Severity per symptom, 0 (none) .. 3 (severe), in the instrument's item order.
using SsqAnswers = std::array<int, kSsqItems>;

struct SsqScores {
    double nausea = 0.0;
    double oculomotor = 0.0;
    double disorientation = 0.0;
    double total = 0.0;

    bool operator==(const SsqScores&) const = default;
};

/// Item-to-subscale assignment and scaling constants. The defaults are the
/// Kennedy et al. worksheet; swap in another weighting by constructing one.
struct SsqScoring {
    std::array<bool, kSsqItems> nausea{};
    std::array<bool, kSsqItems> oculomotor{};
    std::array<bool, kSsqItems> disorientation{};
    double nausea_scale = 9.54;
    double oculomotor_scale = 7.58;
    double disorientation_scale = 13.92;
    double total_scale = 3.74;

    static const SsqScoring& kennedy();
};

SsqScores ssq_scores(std::span<const int> answers, const SsqScoring& scoring = SsqScoring::kennedy());

/// Single question -> its score; several questions -> their mean. Scores must be in 1..5.
double likert_metric(std::span<const int> answers);

/// SUD passthrough, validated against [0, sud_max].
double sud_value(double answer, double sud_max = 100.0);

/// Expected question count per subjective metric. 0 means "one or more".
struct QuestionMap {
    std::map<std::string, int> questions;
    double sud_max = 100.0;

    int expected(const std::string& metric_id) const;
    static QuestionMap defaults();
    static QuestionMap from_json(const nlohmann::json& j);
};

/// One participant's answer file.
struct QuestionnaireAnswers {
    std::string participant;
    std::string technique;
    std::map<std::string, nlohmann::json> demographics;
    std::optional<SsqAnswers> pre_ssq;
    std::map<Scenario, std::map<std::string, std::vector<int>>> after_scenario;
    std::optional<double> sud;  // S2 only
    std::map<std::string, std::vector<int>> post_test;
    std::optional<SsqAnswers> post_ssq;

    bool operator==(const QuestionnaireAnswers&) const = default;
};

/// Parses and validates an answer document; `source` names the file in errors.
QuestionnaireAnswers parse_questionnaire(const nlohmann::json& doc, const std::string& source = {},
                                         const QuestionMap& map = QuestionMap::defaults());
nlohmann::json to_json(const QuestionnaireAnswers& q);

enum class SsqMode { PostOnly, Delta };

/// SSQ values used for scoring: post-test scores, or post minus pre when `mode` is Delta.
std::optional<SsqScores> scored_ssq(const QuestionnaireAnswers& q, SsqMode mode);

}  // namespace locoscore
