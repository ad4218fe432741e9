#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "logitdyn/error.hpp"

namespace logitdyn {

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96) {
    if (trials == 0) throw invalid_parameters("wilson_interval needs at least one trial");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (phat + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Type-7 (linear interpolation) sample quantile; `values` need not be sorted.
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw invalid_parameters("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
};

inline MeanStd mean_std(const std::vector<double>& v) {
    MeanStd out;
    if (v.empty()) return out;
    for (double x : v) out.mean += x;
    out.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

/// Standard error of the mean of a correlated series by non-overlapping batch means.
inline double batch_means_stderr(const std::vector<double>& series, std::size_t batches = 50) {
    if (series.size() < 2 * batches) throw invalid_parameters("series too short for batch means");
    const std::size_t len = series.size() / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t k = 0; k < len; ++k) means[b] += series[b * len + k];
        means[b] /= static_cast<double>(len);
    }
    return mean_std(means).stddev / std::sqrt(static_cast<double>(batches));
}

}  // namespace logitdyn
