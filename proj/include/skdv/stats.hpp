#pragma once

#include <array>
#include <vector>

namespace skdv {

struct MeanEstimate {
    double mean = 0;
    double standard_error = 0;
};

MeanEstimate mean_estimate(const std::vector<double>& xs);
double median(std::vector<double> xs);
// Linear interpolation between order statistics, level in [0, 1].
double quantile(std::vector<double> xs, double level);
// Minimum, quartiles and maximum.
std::array<double, 5> five_number_summary(const std::vector<double>& xs);

struct LineFit {
    double slope = 0;
    double intercept = 0;
};

// Least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Least squares in log-log coordinates; all entries must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

double sample_skewness(const std::vector<double>& xs);
double sample_excess_kurtosis(const std::vector<double>& xs);
// Pearson correlation with its large-sample standard error 1/sqrt(n).
MeanEstimate correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace skdv
