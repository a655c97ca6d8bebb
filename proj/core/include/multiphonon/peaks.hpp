// peaks.hpp: Prominence-filtered local maxima and the Kerr scale they imply.

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace multiphonon {

struct PeakOptions {
    double prominence_fraction{0.05}; // of max(y) - min(y)
};

struct PeakReport {
    std::vector<double> positions;  // strictly increasing
    std::vector<double> prominences;
    std::vector<double> spacings;
    std::optional<double> inferred_kerr; // mean spacing, omega chi^2
    std::optional<double> inferred_g;    // sqrt(inferred_kerr * omega)
};

// x must be strictly increasing, with at least five samples.
PeakReport detect_peaks(std::span<const double> x, std::span<const double> y, const PeakOptions& options = {});

} // namespace multiphonon
