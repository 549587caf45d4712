#pragma once

#include <span>

namespace sibyl {

// Quantile of an ascending-sorted, non-empty sample by linear interpolation
// between order statistics: h = (n - 1) * q, v[floor h] + frac(h) * (v[floor h + 1] - v[floor h]).
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace sibyl
