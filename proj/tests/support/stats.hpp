#pragma once

// Test-only sample statistics and the Kolmogorov-Smirnov distance against a
// reference CDF.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace testsupport {

inline double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

inline double sample_covariance(const std::vector<double>& xs,
                                const std::vector<double>& ys) {
    const double mx = sample_mean(xs);
    const double my = sample_mean(ys);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - mx) * (ys[i] - my);
    return s / static_cast<double>(xs.size() - 1);
}

inline double sample_correlation(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
    return sample_covariance(xs, ys) /
           std::sqrt(sample_variance(xs) * sample_variance(ys));
}

// KS distance; sorts a copy of the sample. Tied values (an atom of the
// reference law) are compared on the right side only, where the reference
// CDF includes the atom mass; the left limit would need the CDF just below
// the atom, which the lambda cannot provide.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sample.size()) {
        std::size_t j = i;
        while (j < sample.size() && sample[j] == sample[i]) ++j;
        const double c = cdf(sample[i]);
        d = std::max(d, std::fabs(c - static_cast<double>(j) / n));
        if (j == i + 1)
            d = std::max(d, std::fabs(c - static_cast<double>(i) / n));
        i = j;
    }
    return d;
}

}  // namespace testsupport
