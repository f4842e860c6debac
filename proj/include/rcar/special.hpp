#pragma once

namespace rcar {

// Standard normal CDF and survival function.
double normal_cdf(double x);
double normal_sf(double x);

// Standard normal quantile, Wichura's AS241 (double precision).
// Throws parameter_error unless 0 < p < 1.
double normal_quantile(double p);

// Chi-squared with 1 degree of freedom: survival P(X >= x) and the upper
// quantile q with P(X >= q) = alpha.
double chi2_1_sf(double x);
double chi2_1_upper_quantile(double alpha);

// Upper quantile of N(0,1): c with P(Z >= c) = alpha.
double normal_upper_quantile(double alpha);

}  // namespace rcar
