#pragma once

#include <array>
#include <complex>
#include <vector>

#include "ascan/signal_core.hpp"

namespace ascan {

// Time window over which echo features are measured, in the units of the
// scan grid (microseconds for the standard instrument settings).
struct EchoWindow {
    double t_lo = 11.8;
    double t_hi = 22.0;
};

EchoWindow make_echo_window(double t_lo, double t_hi);

// Phase and magnitude of the windowed trace at three full-record DFT bins.
// The packed order, phases first, is the one the statistical model uses.
struct FeatureVector {
    std::array<int, 3> bins{};
    std::array<double, 3> phase{};      // radians, 0 when the bin is empty
    std::array<double, 3> amplitude{};  // |windowed DFT coefficient|

    std::array<double, 6> packed() const {
        return {phase[0], phase[1], phase[2], amplitude[0], amplitude[1], amplitude[2]};
    }
};

// Converts three windowed DFT coefficients to the packed feature form. An
// exactly zero coefficient has no meaningful phase and maps to phase 0.
FeatureVector features_from_bins(const std::array<std::complex<double>, 3>& coeffs,
                                 const std::array<int, 3>& bins);

// Windowed DFT coefficient of the scan at a full-record bin: the sum of
// samples[n] * exp(-2 pi i * bin * n / N) over the samples inside the window,
// which equals the length-N DFT of the trace zeroed outside the window.
std::complex<double> windowed_bin(const AScan& scan, int bin, const EchoWindow& window);

FeatureVector extract_features(const AScan& scan, const EchoWindow& window,
                               const std::array<int, 3>& bins);

// Picks the three bins with the largest mean windowed amplitude over the
// present scans of a reference set. DC and bins at or above max_freq_mhz are
// excluded; ties resolve to the lower bin; the result is ascending.
std::array<int, 3> select_dominant_bins(const ScanSet& reference, const EchoWindow& window,
                                        double max_freq_mhz = 6.5);

// Features of every present scan, in row-major location order.
std::vector<FeatureVector> collect_features(const ScanSet& set, const EchoWindow& window,
                                            const std::array<int, 3>& bins);

// Mean and covariance of the packed features over reference locations.
// ridge is the value added to each diagonal entry when the plain sample
// covariance was numerically singular; degenerate records that this
// happened.
struct FeatureCovariance {
    std::array<int, 3> bins{};
    std::array<double, 6> mean{};
    std::array<std::array<double, 6>, 6> sigma{};
    int n_samples = 0;
    double ridge = 0.0;
    bool degenerate = false;
};

FeatureCovariance estimate_covariance(const std::vector<FeatureVector>& features);
FeatureCovariance estimate_covariance(const ScanSet& reference, const EchoWindow& window,
                                      const std::array<int, 3>& bins);

}  // namespace ascan
