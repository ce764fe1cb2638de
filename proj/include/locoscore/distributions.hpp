#pragma once

namespace locoscore::dist {

double normal_cdf(double x);
double normal_sf(double x);
double normal_quantile(double p);

/// Upper tail P(F > f) of the F distribution with (df1, df2) degrees of freedom.
double f_sf(double f, double df1, double df2);

/// Upper tail P(X > x) of the chi-square distribution.
double chi2_sf(double x, double df);

/// P(Q <= q) for the studentized range of `k` means with `df` error degrees of freedom.
/// `df` may be infinite (range of k standard normals).
double studentized_range_cdf(double q, int k, double df);
double studentized_range_sf(double q, int k, double df);

}  // namespace locoscore::dist
