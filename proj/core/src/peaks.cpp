#include "multiphonon/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace multiphonon {

namespace {

// Topographic prominence of the maximum at i: its height above the higher of
// the two lowest points separating it from taller terrain (or the series ends).
double prominence(std::span<const double> y, std::size_t i)
{
    const double peak = y[i];
    double left_min = peak;
    for (std::size_t j = i; j-- > 0;) {
        if (y[j] > peak) break;
        left_min = std::min(left_min, y[j]);
    }
    double right_min = peak;
    for (std::size_t j = i + 1; j < y.size(); ++j) {
        if (y[j] > peak) break;
        right_min = std::min(right_min, y[j]);
    }
    return peak - std::max(left_min, right_min);
}

} // namespace

PeakReport detect_peaks(std::span<const double> x, std::span<const double> y, const PeakOptions& options)
{
    if (x.size() != y.size()) throw std::invalid_argument("detect_peaks: x and y differ in length");
    if (x.size() < 5) throw std::invalid_argument("detect_peaks: need at least 5 samples");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw std::invalid_argument("detect_peaks: x must be strictly increasing");
    }

    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double threshold = options.prominence_fraction * (*hi - *lo);

    PeakReport report;
    if (*hi == *lo) return report;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        // Flat tops count once, at their left edge.
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        std::size_t right = i;
        while (right + 1 < y.size() && y[right + 1] == y[i]) ++right;
        if (right + 1 == y.size() || y[right + 1] > y[i]) continue;
        const double p = prominence(y, i);
        if (p >= threshold && p > 0.0) {
            report.positions.push_back(x[i]);
            report.prominences.push_back(p);
        }
    }

    for (std::size_t i = 1; i < report.positions.size(); ++i) {
        report.spacings.push_back(report.positions[i] - report.positions[i - 1]);
    }
    if (!report.spacings.empty()) {
        const double mean = std::accumulate(report.spacings.begin(), report.spacings.end(), 0.0) /
                            static_cast<double>(report.spacings.size());
        report.inferred_kerr = mean;
        report.inferred_g = std::sqrt(mean);
    }
    return report;
}

} // namespace multiphonon
