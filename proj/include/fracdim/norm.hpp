#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fracdim {

using Vec = std::vector<double>;

// Chebyshev is the default everywhere: its balls are axis-aligned boxes, so
// ball geometry lines up with dyadic cubes. Euclidean is selectable per call.
enum class Norm { Chebyshev, Euclidean };

inline double norm_dist(const Vec& a, const Vec& b, Norm norm = Norm::Chebyshev) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = std::abs(a[j] - b[j]);
        if (norm == Norm::Chebyshev) {
            acc = std::max(acc, d);
        } else {
            acc += d * d;
        }
    }
    return norm == Norm::Chebyshev ? acc : std::sqrt(acc);
}

// Open balls are the global convention.
inline bool ball_contains(const Vec& center, double r, const Vec& x,
                          Norm norm = Norm::Chebyshev) {
    return norm_dist(center, x, norm) < r;
}

}  // namespace fracdim
