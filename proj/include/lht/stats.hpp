#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lht::stats {

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / 1.4142135623730950488016887242097);
}

// Inverse standard normal CDF.  Acklam's rational approximation refined by
// one Halley step against erfc, accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

// Pairwise (cascade) summation: fixed association order for a given length,
// independent of how the values were produced.
double pairwise_sum(std::span<const double> x);

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0; // sample variance (n-1 denominator), 0 if n < 2
};

MeanVariance mean_variance(std::span<const double> x);

} // namespace lht::stats
