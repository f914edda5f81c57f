#pragma once

#include <span>

namespace kgex {

double mean(std::span<const double> values);

// Pearson correlation. Bitwise-identical inputs return 1.0 exactly (the
// mathematical value; the general formula can be off by an ulp there).
double pearson(std::span<const double> x, std::span<const double> y);

// Least-squares slope of y regressed on x: cov(x,y)/var(x).
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kgex
