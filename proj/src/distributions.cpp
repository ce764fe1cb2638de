#include "locoscore/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "locoscore/error.hpp"

namespace locoscore::dist {

namespace bm = boost::math;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double p) { return bm::quantile(bm::normal_distribution<double>(), p); }

double f_sf(double f, double df1, double df2) {
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    return bm::cdf(bm::complement(bm::fisher_f_distribution<double>(df1, df2), f));
}

double chi2_sf(double x, double df) {
    if (!(x > 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    return bm::cdf(bm::complement(bm::chi_squared_distribution<double>(df), x));
}

namespace {

using Rule = bm::quadrature::gauss<double, 20>;

// Probability that the range of k standard normal draws is <= w:
//   k * integral phi(z) * (Phi(z) - Phi(z - w))^(k-1) dz
double range_cdf(double w, int k) {
    if (!(w > 0.0)) return 0.0;
    const double inv_sqrt_2pi = 0.3989422804014327;
    const auto integrand = [&](double z) {
        // Difference of tails avoids cancellation when both CDFs are close to 1.
        const double band = (z - 0.5 * w > 0.0) ? normal_sf(z - w) - normal_sf(z)
                                                 : normal_cdf(z) - normal_cdf(z - w);
        return inv_sqrt_2pi * std::exp(-0.5 * z * z) * std::pow(std::max(band, 0.0), k - 1);
    };
    // phi(z) < 1e-16 outside [-8.5, 8.5]; eight panels keep each rule on a near-polynomial piece.
    constexpr double lo = -8.5, hi = 8.5;
    constexpr int panels = 8;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + (hi - lo) * i / panels;
        const double b = lo + (hi - lo) * (i + 1) / panels;
        total += Rule::integrate(integrand, a, b);
    }
    return std::clamp(k * total, 0.0, 1.0);
}

}  // namespace

double studentized_range_cdf(double q, int k, double df) {
    if (k < 2) throw Error("studentized range needs k >= 2");
    if (!(df > 0.0)) throw Error("studentized range needs df > 0");
    if (!(q > 0.0)) return 0.0;
    if (std::isinf(q)) return 1.0;
    if (std::isinf(df) || df > 1e7) return range_cdf(q, k);

    // E[ W(q * s) ] with s = sqrt(chi2_df / df). Panels are cut at quantiles of s so that
    // every piece carries comparable mass whatever the degrees of freedom.
    static constexpr std::array<double, 21> probs{
        1e-15, 1e-10, 1e-7, 1e-5, 1e-3, 0.01, 0.05, 0.15, 0.3, 0.5, 0.7,
        0.85,  0.95,  0.99, 1 - 1e-3, 1 - 1e-5, 1 - 1e-7, 1 - 1e-10, 1 - 1e-13, 1 - 1e-15, 1.0};
    const bm::chi_squared_distribution<double> chi2(df);
    const auto s_at = [&](double p) {
        if (p >= 1.0) return std::sqrt(bm::quantile(bm::complement(chi2, 1e-17)) / df);
        return std::sqrt(bm::quantile(chi2, p) / df);
    };
    const double half = 0.5 * df;
    const double log_norm = std::log(2.0) + half * std::log(half) - std::lgamma(half);
    const auto integrand = [&](double s) {
        if (!(s > 0.0)) return 0.0;
        const double log_density = log_norm + (df - 1.0) * std::log(s) - half * s * s;
        return std::exp(log_density) * range_cdf(q * s, k);
    };

    double total = 0.0;
    double a = 0.0;
    for (double p : probs) {
        const double b = s_at(p);
        if (b > a) total += Rule::integrate(integrand, a, b);
        a = b;
    }
    return std::clamp(total, 0.0, 1.0);
}

double studentized_range_sf(double q, int k, double df) {
    return std::clamp(1.0 - studentized_range_cdf(q, k, df), 0.0, 1.0);
}

}  // namespace locoscore::dist
