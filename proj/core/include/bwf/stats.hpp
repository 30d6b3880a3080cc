#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bwf {

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; accurate to ~1e-15).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares line y ~ intercept + slope * x.
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

/// Two-sided Kolmogorov-Smirnov statistic of a sorted sample against a CDF.
double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf);

/// KS statistic against the standard normal (sorts a copy).
double ks_statistic_normal(std::vector<double> sample);

/// Critical KS distance at level alpha for sample size n (asymptotic
/// Kolmogorov quantile with the Stephens small-sample adjustment).
double kolmogorov_critical_value(double alpha, std::size_t n);

/// Empirical quantile of a sorted sample: the ceil(q*n)-th order statistic.
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace bwf
