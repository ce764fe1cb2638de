#pragma once

#include <span>
#include <string>
#include <vector>

namespace locoscore {

/// One list of per-participant values per technique, in technique order.
using GroupedSamples = std::vector<std::vector<double>>;

/// Square matrix of pairwise p-values; symmetric, diagonal fixed at 1.
class PairMatrix {
public:
    PairMatrix() = default;
    explicit PairMatrix(std::size_t n) : n_(n), p_(n * n, 1.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return p_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double p) {
        p_[i * n_ + j] = p;
        p_[j * n_ + i] = p;
    }
    bool operator==(const PairMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> p_;
};

struct ZScoreSplit {
    std::vector<double> kept;
    std::vector<double> removed;
};

/// Drops values whose population z-score reaches `threshold` (|x - mean| / sd >= threshold).
/// Nothing is removed when sd is 0. Order of the kept values is preserved.
ZScoreSplit zscore_filter(std::span<const double> samples, double threshold = 3.0);

struct TestStatistic {
    double statistic = 0.0;
    double p = 1.0;
};

/// Royston's approximation for 3 <= n <= 5000. Throws UntestableError for n < 3 or constant data.
TestStatistic shapiro_wilk(std::span<const double> samples);

TestStatistic anova_oneway(const GroupedSamples& groups);
/// Tukey-Kramer pairwise p-values from the studentized range with (k, N - k) df.
PairMatrix tukey_hsd(const GroupedSamples& groups);

TestStatistic kruskal_wallis(const GroupedSamples& groups);

enum class Adjustment { None, Bonferroni, Holm };

std::string to_string(Adjustment a);
Adjustment parse_adjustment(const std::string& text);

/// Dunn's z-test on mean ranks with tie correction; two-sided p-values.
PairMatrix dunn_test(const GroupedSamples& groups, Adjustment adjustment = Adjustment::None);

enum class TestPlan { Parametric, Nonparametric };

std::string to_string(TestPlan p);

struct SignificanceResult {
    TestPlan plan = TestPlan::Nonparametric;
    double omnibus_statistic = 0.0;
    double omnibus_p = 1.0;
    PairMatrix pairwise_p;
    double alpha = 0.05;
    std::vector<double> normality_p;  // per group; NaN when untestable

    bool significant(std::size_t i, std::size_t j) const { return pairwise_p(i, j) <= alpha; }
    bool any_significant() const;
};

/// Shapiro-Wilk per group (non-normal when p < alpha or untestable), then ANOVA + Tukey
/// if all groups pass, otherwise Kruskal-Wallis + Dunn.
SignificanceResult compare_groups(const GroupedSamples& groups, double alpha = 0.05,
                                  Adjustment adjustment = Adjustment::None);

/// Midranks (1-based) of the pooled sample.
std::vector<double> midranks(std::span<const double> values);

}  // namespace locoscore
