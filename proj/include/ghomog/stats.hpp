#pragma once

#include <vector>

namespace ghomog {

double mean(const std::vector<double>& v);
/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double stddev(const std::vector<double>& v);
double std_error(const std::vector<double>& v);
double median(std::vector<double> v);

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log y against log x (all values must be positive).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ghomog
