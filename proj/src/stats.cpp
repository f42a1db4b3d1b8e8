#include "skdv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skdv {

MeanEstimate mean_estimate(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return {mean, 0};
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= n - 1;
    return {mean, std::sqrt(var / n)};
}

double quantile(std::vector<double> xs, double level) {
    if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = std::clamp(level, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1 - w) * xs[lo] + w * xs[hi];
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

std::array<double, 5> five_number_summary(const std::vector<double>& xs) {
    if (xs.empty()) return {0, 0, 0, 0, 0};
    return {quantile(xs, 0), quantile(xs, 0.25), quantile(xs, 0.5), quantile(xs, 0.75), quantile(xs, 1)};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need matching samples, at least two");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("fit_loglog: nonpositive entry");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

namespace {

double central_moment(const std::vector<double>& xs, double mean, int k) {
    double acc = 0;
    for (double x : xs) acc += std::pow(x - mean, k);
    return acc / static_cast<double>(xs.size());
}

}  // namespace

double sample_skewness(const std::vector<double>& xs) {
    const double mean = mean_estimate(xs).mean;
    const double m2 = central_moment(xs, mean, 2);
    return central_moment(xs, mean, 3) / std::pow(m2, 1.5);
}

double sample_excess_kurtosis(const std::vector<double>& xs) {
    const double mean = mean_estimate(xs).mean;
    const double m2 = central_moment(xs, mean, 2);
    return central_moment(xs, mean, 4) / (m2 * m2) - 3;
}

MeanEstimate correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 3) throw std::invalid_argument("correlation: need matching samples");
    const double ma = mean_estimate(a).mean, mb = mean_estimate(b).mean;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return {sab / std::sqrt(saa * sbb), 1 / std::sqrt(static_cast<double>(a.size()))};
}

}  // namespace skdv
