#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace momentlock {

/// Neumaier-compensated sum. Probability normalizations route through this so
/// that renormalized vectors sum to 1 within a few ulp regardless of length.
inline double compensated_sum(std::span<const double> xs) {
    double s = 0.0;
    double c = 0.0;
    for (double x : xs) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    return s + c;
}

/// i-th of n+1 equally spaced samples of [lo, hi], endpoints exact.
inline double lerp_grid(double lo, double hi, std::size_t i, std::size_t n) {
    double t = static_cast<double>(i) / static_cast<double>(n);
    return lo * (1.0 - t) + hi * t;
}

}  // namespace momentlock
