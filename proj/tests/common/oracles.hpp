// Textbook formulas written out directly, used as independent oracles for the stats module.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locoscore/stats.hpp"

namespace locoscore::testkit {

/// F = (SSB / (k - 1)) / (SSW / (N - k)), two passes over the data.
inline double oracle_f(const GroupedSamples& groups) {
    double grand = 0.0;
    std::size_t n = 0;
    for (const auto& g : groups)
        for (double v : g) grand += v, ++n;
    grand /= static_cast<double>(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        double m = 0.0;
        for (double v : g) m += v;
        m /= static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ssw += (v - m) * (v - m);
    }
    const double k = static_cast<double>(groups.size());
    return (ssb / (k - 1.0)) / (ssw / (static_cast<double>(n) - k));
}

/// H from O(N^2) midranks, divided by 1 - sum(t^3 - t) / (N^3 - N).
inline double oracle_h(const GroupedSamples& groups) {
    std::vector<double> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    const double n = static_cast<double>(all.size());
    const auto rank = [&](double x) {
        double below = 0, equal = 0;
        for (double v : all) below += v < x, equal += v == x;
        return below + (equal + 1.0) / 2.0;
    };
    double h = 0.0;
    for (const auto& g : groups) {
        double r = 0.0;
        for (double v : g) r += rank(v);
        h += r * r / static_cast<double>(g.size());
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    return h / (1.0 - ties / (n * n * n - n));
}

inline nlohmann::json load_reference() {
    std::ifstream in(LOCOSCORE_REFERENCE_FILE);
    return nlohmann::json::parse(in);
}

inline GroupedSamples groups_of(const nlohmann::json& dataset) {
    return dataset.at("groups").get<GroupedSamples>();
}

/// Largest |a(i,j) - ref[i][j]| over the off-diagonal entries.
inline double max_pair_error(const PairMatrix& a, const nlohmann::json& ref) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) worst = std::max(worst, std::abs(a(i, j) - ref[i][j].get<double>()));
    return worst;
}

}  // namespace locoscore::testkit
