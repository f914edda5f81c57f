#include "kgex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgex/types.hpp"

namespace kgex {

double mean(std::span<const double> values) {
    if (values.empty()) throw Error("mean of empty range");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("pearson: need two equal-length series");
    if (std::equal(x.begin(), x.end(), y.begin())) return 1.0;

    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;  // constant series carry no correlation
    return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("slope: need two equal-length series");
    if (std::equal(x.begin(), x.end(), y.begin())) return 1.0;  // y == x exactly

    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        sxy += dx * (y[i] - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();  // degenerate constant series
    return sxy / sxx;
}

}  // namespace kgex
