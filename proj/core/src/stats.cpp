#include "bwf/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bwf/errors.hpp"

namespace bwf {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) raise(ErrorKind::InvalidArgument, "normal_quantile needs p in (0,1)");

  // Acklam's rational approximation.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley refinement against erfc brings the error near machine epsilon.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x -= u / (1.0 + x * u / 2.0);
  return x;
}

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    raise(ErrorKind::InvalidArgument, "least_squares_line needs two equally sized samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) raise(ErrorKind::InvalidArgument, "least_squares_line: degenerate abscissa");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_sample.size();
  if (n == 0) raise(ErrorKind::InvalidArgument, "ks_statistic: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted_sample[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

double ks_statistic_normal(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  return ks_statistic(sample, [](double x) { return normal_cdf(x); });
}

namespace {

// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double t) {
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return sum;
}

}  // namespace

double kolmogorov_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0)
    raise(ErrorKind::InvalidArgument, "kolmogorov_critical_value: bad alpha or n");
  double lo = 0.1, hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_sf(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  const double c = 0.5 * (lo + hi);
  const double sn = std::sqrt(static_cast<double>(n));
  // Stephens' finite-sample adjustment.
  return c / (sn + 0.12 + 0.11 / sn);
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) raise(ErrorKind::InvalidArgument, "sorted_quantile: empty sample");
  if (q <= 0.0) return sorted.front();
  const auto n = sorted.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return sorted[k - 1];
}

}  // namespace bwf
