#include "locoscore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "locoscore/distributions.hpp"
#include "locoscore/error.hpp"

namespace locoscore {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_groups(const GroupedSamples& groups) {
    if (groups.size() < 2) throw Error("need at least 2 groups");
    for (const auto& g : groups)
        if (g.empty()) throw Error("empty group");
}

template <std::size_t N>
double poly(const double (&c)[N], double x) {
    double r = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
    return r;
}

}  // namespace

ZScoreSplit zscore_filter(std::span<const double> samples, double threshold) {
    ZScoreSplit out;
    if (samples.empty()) return out;
    const double m = mean_of(samples);
    double ss = 0.0;
    for (double x : samples) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(samples.size()));
    for (double x : samples) {
        if (sd > 0.0 && std::abs(x - m) / sd >= threshold)
            out.removed.push_back(x);
        else
            out.kept.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk (Royston 1995 coefficients and normalizing transformation)
// ---------------------------------------------------------------------------

TestStatistic shapiro_wilk(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 3) throw UntestableError("Shapiro-Wilk needs at least 3 values");
    if (n > 5000) throw UntestableError("Shapiro-Wilk supports at most 5000 values");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    if (x.back() - x.front() <= 1e-19 * std::max(1.0, std::abs(x.front())))
        throw UntestableError("Shapiro-Wilk on a constant sample");

    const std::size_t half = n / 2;
    std::vector<double> a(half);  // coefficients for the lower half, positive
    const double an = static_cast<double>(n);
    if (n == 3) {
        a[0] = std::sqrt(0.5);
    } else {
        static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
        static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
        std::vector<double> m(half);
        double summ2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            m[i] = dist::normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - m[0] / ssumm2;
        std::size_t first = 1;
        double fac = 0.0;
        if (n > 5) {
            const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[1] = a2;
            first = 2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        a[0] = a1;
        for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
    }

    // W as the squared correlation between the ordered sample and the coefficients.
    double num = 0.0, asq = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        num += a[i] * (x[n - 1 - i] - x[i]);
        asq += 2.0 * a[i] * a[i];
    }
    const double xm = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - xm) * (v - xm);
    double w = (num * num) / (asq * ss);
    w = std::min(w, 1.0);

    if (n == 3) {
        constexpr double six_over_pi = 1.90985931710274;
        constexpr double asin_sqrt_3_4 = 1.04719755119660;
        const double p = six_over_pi * (std::asin(std::sqrt(w)) - asin_sqrt_3_4);
        return {w, std::clamp(p, 0.0, 1.0)};
    }

    const double w1 = 1.0 - w;
    double y = std::log(w1);
    double mu = 0.0, sigma = 1.0;
    if (n <= 11) {
        static constexpr double g[] = {-2.273, 0.459};
        static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
        static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
        const double gamma = poly(g, an);
        if (y >= gamma) return {w, 1e-99};
        y = -std::log(gamma - y);
        mu = poly(c3, an);
        sigma = std::exp(poly(c4, an));
    } else {
        static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
        static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
        const double ln = std::log(an);
        mu = poly(c5, ln);
        sigma = std::exp(poly(c6, ln));
    }
    return {w, std::clamp(dist::normal_sf((y - mu) / sigma), 0.0, 1.0)};
}

// ---------------------------------------------------------------------------
// Parametric branch
// ---------------------------------------------------------------------------

namespace {

struct AnovaParts {
    std::vector<double> means;
    double ss_between = 0.0;
    double ss_within = 0.0;
    double df_between = 0.0;
    double df_within = 0.0;
    bool equal_means = true;
};

AnovaParts anova_parts(const GroupedSamples& groups) {
    require_groups(groups);
    AnovaParts a;
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& g : groups) {
        a.means.push_back(mean_of(g));
        total += std::accumulate(g.begin(), g.end(), 0.0);
        n += g.size();
    }
    const double grand = total / static_cast<double>(n);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double d = a.means[i] - grand;
        a.ss_between += static_cast<double>(groups[i].size()) * d * d;
        for (double x : groups[i]) a.ss_within += (x - a.means[i]) * (x - a.means[i]);
        if (a.means[i] != a.means[0]) a.equal_means = false;
    }
    a.df_between = static_cast<double>(groups.size() - 1);
    a.df_within = static_cast<double>(n - groups.size());
    if (a.df_within <= 0) throw UntestableError("ANOVA needs more observations than groups");
    return a;
}

}  // namespace

TestStatistic anova_oneway(const GroupedSamples& groups) {
    const auto a = anova_parts(groups);
    if (a.ss_within == 0.0) {
        if (a.equal_means) return {0.0, 1.0};
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    if (a.equal_means) return {0.0, 1.0};
    const double f = (a.ss_between / a.df_between) / (a.ss_within / a.df_within);
    return {f, dist::f_sf(f, a.df_between, a.df_within)};
}

PairMatrix tukey_hsd(const GroupedSamples& groups) {
    const auto a = anova_parts(groups);
    const std::size_t k = groups.size();
    const double msw = a.ss_within / a.df_within;
    PairMatrix out(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double diff = std::abs(a.means[i] - a.means[j]);
            double p = 1.0;
            if (diff > 0.0) {
                if (msw == 0.0) {
                    p = 0.0;
                } else {
                    const double se = std::sqrt(0.5 * msw *
                                                (1.0 / static_cast<double>(groups[i].size()) +
                                                 1.0 / static_cast<double>(groups[j].size())));
                    p = dist::studentized_range_sf(diff / se, static_cast<int>(k), a.df_within);
                }
            }
            out.set(i, j, p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nonparametric branch
// ---------------------------------------------------------------------------

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

struct RankParts {
    std::vector<double> rank_sums;
    std::vector<double> sizes;
    double n = 0.0;
    double tie_sum = 0.0;  // sum of t^3 - t over tie groups
};

RankParts rank_parts(const GroupedSamples& groups) {
    require_groups(groups);
    std::vector<double> pooled;
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    const auto ranks = midranks(pooled);
    RankParts r;
    r.n = static_cast<double>(pooled.size());
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += ranks[offset + i];
        r.rank_sums.push_back(s);
        r.sizes.push_back(static_cast<double>(g.size()));
        offset += g.size();
    }
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        r.tie_sum += t * t * t - t;
        i = j;
    }
    return r;
}

}  // namespace

TestStatistic kruskal_wallis(const GroupedSamples& groups) {
    const auto r = rank_parts(groups);
    const double n = r.n;
    const double correction = 1.0 - r.tie_sum / (n * n * n - n);
    if (correction <= 0.0) return {0.0, 1.0};
    double s = 0.0;
    for (std::size_t i = 0; i < r.rank_sums.size(); ++i) s += r.rank_sums[i] * r.rank_sums[i] / r.sizes[i];
    double h = (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / correction;
    h = std::max(h, 0.0);
    return {h, dist::chi2_sf(h, static_cast<double>(groups.size() - 1))};
}

std::string to_string(Adjustment a) {
    switch (a) {
        case Adjustment::None: return "none";
        case Adjustment::Bonferroni: return "bonferroni";
        case Adjustment::Holm: return "holm";
    }
    return "?";
}

Adjustment parse_adjustment(const std::string& text) {
    if (text == "none") return Adjustment::None;
    if (text == "bonferroni") return Adjustment::Bonferroni;
    if (text == "holm") return Adjustment::Holm;
    throw Error("unknown p-value adjustment '" + text + "'");
}

PairMatrix dunn_test(const GroupedSamples& groups, Adjustment adjustment) {
    const auto r = rank_parts(groups);
    const std::size_t k = groups.size();
    const double n = r.n;
    const double variance = n * (n + 1.0) / 12.0 - r.tie_sum / (12.0 * (n - 1.0));

    struct Pair {
        std::size_t i, j;
        double p;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double diff = r.rank_sums[i] / r.sizes[i] - r.rank_sums[j] / r.sizes[j];
            double p = 1.0;
            if (variance > 0.0 && diff != 0.0) {
                const double z = diff / std::sqrt(variance * (1.0 / r.sizes[i] + 1.0 / r.sizes[j]));
                p = std::min(1.0, 2.0 * dist::normal_sf(std::abs(z)));
            }
            pairs.push_back({i, j, p});
        }
    }

    const double m = static_cast<double>(pairs.size());
    if (adjustment == Adjustment::Bonferroni) {
        for (auto& pr : pairs) pr.p = std::min(1.0, m * pr.p);
    } else if (adjustment == Adjustment::Holm) {
        std::vector<std::size_t> order(pairs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pairs[a].p < pairs[b].p; });
        double running = 0.0;
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            auto& pr = pairs[order[rank]];
            running = std::max(running, std::min(1.0, (m - static_cast<double>(rank)) * pr.p));
            pr.p = running;
        }
    }

    PairMatrix out(k);
    for (const auto& pr : pairs) out.set(pr.i, pr.j, pr.p);
    return out;
}

// ---------------------------------------------------------------------------

std::string to_string(TestPlan p) { return p == TestPlan::Parametric ? "parametric" : "nonparametric"; }

bool SignificanceResult::any_significant() const {
    for (std::size_t i = 0; i < pairwise_p.size(); ++i)
        for (std::size_t j = i + 1; j < pairwise_p.size(); ++j)
            if (significant(i, j)) return true;
    return false;
}

SignificanceResult compare_groups(const GroupedSamples& groups, double alpha, Adjustment adjustment) {
    require_groups(groups);
    SignificanceResult out;
    out.alpha = alpha;
    bool normal = true;
    for (const auto& g : groups) {
        try {
            const auto sw = shapiro_wilk(g);
            out.normality_p.push_back(sw.p);
            if (sw.p < alpha) normal = false;
        } catch (const UntestableError&) {
            out.normality_p.push_back(std::numeric_limits<double>::quiet_NaN());
            normal = false;
        }
    }
    if (normal) {
        out.plan = TestPlan::Parametric;
        const auto f = anova_oneway(groups);
        out.omnibus_statistic = f.statistic;
        out.omnibus_p = f.p;
        out.pairwise_p = tukey_hsd(groups);
    } else {
        out.plan = TestPlan::Nonparametric;
        const auto h = kruskal_wallis(groups);
        out.omnibus_statistic = h.statistic;
        out.omnibus_p = h.p;
        out.pairwise_p = dunn_test(groups, adjustment);
    }
    return out;
}

}  // namespace locoscore
