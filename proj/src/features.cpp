#include "ascan/features.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "fftw_guard.hpp"

namespace ascan {

EchoWindow make_echo_window(double t_lo, double t_hi) {
    if (!std::isfinite(t_lo) || !std::isfinite(t_hi) || !(t_lo < t_hi))
        throw InvalidArgument("echo window: need finite t_lo < t_hi");
    if (t_lo < 0.0) throw InvalidArgument("echo window: t_lo must be >= 0");
    return EchoWindow{t_lo, t_hi};
}

FeatureVector features_from_bins(const std::array<std::complex<double>, 3>& coeffs,
                                 const std::array<int, 3>& bins) {
    FeatureVector f;
    f.bins = bins;
    for (int i = 0; i < 3; ++i) {
        const auto& z = coeffs[i];
        f.amplitude[i] = std::abs(z);
        f.phase[i] = (z == std::complex<double>(0.0, 0.0)) ? 0.0 : std::atan2(z.imag(), z.real());
    }
    return f;
}

std::complex<double> windowed_bin(const AScan& scan, int bin, const EchoWindow& window) {
    const TimeGrid& grid = scan.grid;
    const int N = grid.n_samples;
    if (bin < 0 || bin >= N) throw InvalidArgument("windowed bin: bin index outside record");
    auto [n0, n1] = window_sample_range(grid, window.t_lo, window.t_hi);
    std::complex<double> acc(0.0, 0.0);
    if (n1 < n0) return acc;
    const double omega = 2.0 * M_PI * bin / (N * grid.dt);
    std::complex<double> rot = std::exp(std::complex<double>(0.0, -omega * grid.time(n0)));
    const std::complex<double> step = std::exp(std::complex<double>(0.0, -omega * grid.dt));
    for (int n = n0; n <= n1; ++n) {
        acc += scan.samples[n] * rot;
        rot *= step;
    }
    return acc;
}

FeatureVector extract_features(const AScan& scan, const EchoWindow& window,
                               const std::array<int, 3>& bins) {
    std::array<std::complex<double>, 3> coeffs;
    for (int i = 0; i < 3; ++i) {
        if (bins[i] < 0 || bins[i] >= scan.grid.n_samples / 2)
            throw InvalidArgument("features: bins must lie below the Nyquist bin");
        coeffs[i] = windowed_bin(scan, bins[i], window);
    }
    return features_from_bins(coeffs, bins);
}

std::array<int, 3> select_dominant_bins(const ScanSet& reference, const EchoWindow& window,
                                        double max_freq_mhz) {
    if (!(max_freq_mhz > 0.0))
        throw InvalidArgument("dominant bins: frequency ceiling must be positive");
    if (reference.count_present() == 0)
        throw InvalidArgument("dominant bins: reference set has no scans");
    const TimeGrid grid = reference.grid();
    const int N = grid.n_samples;
    auto [n0, n1] = window_sample_range(grid, window.t_lo, window.t_hi);
    if (n1 < n0) throw InvalidArgument("dominant bins: window contains no samples");

    // The windowed partial sum at a full-record bin equals the DFT of the
    // trace masked to the window, so one transform per scan covers all bins.
    const int nbins = N / 2 + 1;
    double* in = fftw_alloc_real(N);
    fftw_complex* out = fftw_alloc_complex(nbins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_r2c_1d(N, in, out, FFTW_ESTIMATE);
    }

    std::vector<double> mean_amp(nbins, 0.0);
    for (int iy = 0; iy < reference.ny(); ++iy) {
        for (int ix = 0; ix < reference.nx(); ++ix) {
            if (!reference.has(ix, iy)) continue;
            const AScan& scan = reference.at(ix, iy);
            std::fill(in, in + N, 0.0);
            for (int n = n0; n <= n1; ++n) in[n] = scan.samples[n];
            fftw_execute(plan);
            for (int k = 0; k < nbins; ++k)
                mean_amp[k] += std::hypot(out[k][0], out[k][1]);
        }
    }
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    std::vector<int> candidates;
    for (int k = 1; k < nbins; ++k) {
        if (k / (N * grid.dt) < max_freq_mhz) candidates.push_back(k);
    }
    if (static_cast<int>(candidates.size()) < 3)
        throw InvalidArgument("dominant bins: frequency ceiling leaves fewer than three bins");
    if (std::all_of(candidates.begin(), candidates.end(),
                    [&](int k) { return mean_amp[k] == 0.0; }))
        throw InsufficientData("dominant bins: window spectrum is identically zero");

    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return mean_amp[a] > mean_amp[b]; });
    std::array<int, 3> top{candidates[0], candidates[1], candidates[2]};
    std::sort(top.begin(), top.end());
    return top;
}

std::vector<FeatureVector> collect_features(const ScanSet& set, const EchoWindow& window,
                                            const std::array<int, 3>& bins) {
    std::vector<FeatureVector> out;
    out.reserve(set.count_present());
    for (int iy = 0; iy < set.ny(); ++iy) {
        for (int ix = 0; ix < set.nx(); ++ix) {
            if (set.has(ix, iy)) out.push_back(extract_features(set.at(ix, iy), window, bins));
        }
    }
    return out;
}

FeatureCovariance estimate_covariance(const std::vector<FeatureVector>& features) {
    const int n = static_cast<int>(features.size());
    if (n < 7)
        throw InsufficientData("covariance: need at least 7 feature vectors, got " +
                               std::to_string(n));
    for (const auto& f : features) {
        if (f.bins != features.front().bins)
            throw InvalidArgument("covariance: feature vectors use different bins");
    }

    Eigen::Matrix<double, 6, Eigen::Dynamic> X(6, n);
    for (int i = 0; i < n; ++i) {
        auto p = features[i].packed();
        for (int j = 0; j < 6; ++j) {
            if (!std::isfinite(p[j]))
                throw InvalidArgument("covariance: feature vectors must be finite");
            X(j, i) = p[j];
        }
    }
    Eigen::Matrix<double, 6, 1> mean = X.rowwise().mean();
    X.colwise() -= mean;
    Eigen::Matrix<double, 6, 6> cov = X * X.transpose() / static_cast<double>(n - 1);

    FeatureCovariance result;
    result.bins = features.front().bins;
    result.n_samples = n;
    const double trace = cov.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(cov);
    if (eig.eigenvalues().minCoeff() < 1e-12 * trace || trace == 0.0) {
        // An exactly constant feature set has zero trace; the mean then sets
        // the only available scale for the ridge.
        double scale = trace > 0.0 ? trace / 6.0 : mean.squaredNorm() / 6.0;
        if (!(scale > 0.0))
            throw NumericalError("covariance: features carry no scale to regularize with");
        result.ridge = 1e-10 * scale;
        result.degenerate = true;
        cov.diagonal().array() += result.ridge;
        eig.compute(cov);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
            throw NumericalError("covariance: feature covariance is singular");
    }
    for (int i = 0; i < 6; ++i) {
        result.mean[i] = mean(i);
        for (int j = 0; j < 6; ++j) result.sigma[i][j] = cov(i, j);
    }
    return result;
}

FeatureCovariance estimate_covariance(const ScanSet& reference, const EchoWindow& window,
                                      const std::array<int, 3>& bins) {
    return estimate_covariance(collect_features(reference, window, bins));
}

}  // namespace ascan
