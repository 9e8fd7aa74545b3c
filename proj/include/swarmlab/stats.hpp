#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace swarmlab {

// Two-sided Student-t critical value: P(|T_df| <= q) = confidence.
double t_quantile(double confidence, int df);

struct MeanCi {
    double mean = 0;
    double half_width = 0;  // t-based, infinite when n < 2
    double stddev = 0;      // sample standard deviation
    int n = 0;
    double confidence = 0.95;

    double lo() const { return mean - half_width; }
    double hi() const { return mean + half_width; }
};

MeanCi mean_ci(const std::vector<double>& values, double confidence = 0.95);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

// Ordinary least squares y = intercept + slope x; needs two distinct x.
LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// FNV-1a 64-bit content hash.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace swarmlab
