#pragma once

#include <cmath>

namespace seqsize {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Standard normal quantile: Newton on erfc-based Phi from a logistic start,
// accurate to machine precision for the central range used here.
inline double probit(double p) {
    if (p <= 0.0 || p >= 1.0) return p <= 0.0 ? -INFINITY : INFINITY;
    double x = std::log(p / (1.0 - p)) / 1.702;
    for (int i = 0; i < 100; ++i) {
        const double err = normal_cdf(x) - p;
        const double pdf = std::exp(-0.5 * x * x) * 0.3989422804014326779;
        double step = err / pdf;
        if (step > 1.0) step = 1.0;
        if (step < -1.0) step = -1.0;
        x -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
}

}  // namespace seqsize
