#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

// Small sample statistics shared by the Monte Carlo and estimation code.
// Sums run in index order so results are reproducible.
namespace corrsurf::math {

inline double sample_mean(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x)
        s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// n - 1 denominator.
inline double sample_variance(std::span<const double> x)
{
    if (x.size() < 2)
        return 0.0;
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x)
        s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

// Hyndman-Fan type 7 (linear interpolation between order statistics) on sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty())
        return 0.0;
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> x, double q)
{
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return quantile_sorted(s, q);
}

} // namespace corrsurf::math
