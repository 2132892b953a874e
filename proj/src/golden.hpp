#pragma once

#include <cmath>
#include <utility>

namespace qmaxent::detail {

/// Golden-section minimization of f on [lo, hi]; returns (argmin, min).
template <typename F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, double xtol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > xtol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        if (x1 >= x2) break;  // interval below floating resolution
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace qmaxent::detail
