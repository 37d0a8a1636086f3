#include "ascan/preprocess.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

#include "fftw_guard.hpp"

namespace ascan {

AScan normalize(const RawScan& raw) {
    if (static_cast<int>(raw.counts.size()) != raw.grid.n_samples)
        throw InvalidArgument("normalize: count array does not match grid");
    std::vector<double> samples(raw.counts.size());
    for (size_t i = 0; i < raw.counts.size(); ++i) {
        int c = raw.counts[i];
        if (c < 0 || c > 511)
            throw CorruptInput("normalize: count " + std::to_string(c) + " at sample " +
                               std::to_string(i) + " outside [0, 511]");
        samples[i] = (c - 256) / 256.0;
    }
    return make_ascan(raw.grid, std::move(samples), raw.x_mm, raw.y_mm);
}

FaultReport detect_faulty(const AScan& scan, double t_ex,
                          double echo_threshold, double excitation_threshold) {
    if (!(excitation_threshold > 0.0) || !(echo_threshold > 0.0))
        throw InvalidArgument("detect_faulty: thresholds must be positive");
    if (!(t_ex > scan.grid.t0) || !(t_ex < scan.grid.t0 + scan.grid.duration()))
        throw InvalidArgument("detect_faulty: t_ex outside the record");

    FaultReport report;
    for (int i = 0; i + 1 < scan.grid.n_samples; ++i) {
        double jump = std::abs(scan.samples[i + 1] - scan.samples[i]);
        bool in_excitation = scan.grid.time(i + 1) <= t_ex;
        if (in_excitation) {
            report.max_excitation_jump = std::max(report.max_excitation_jump, jump);
        } else {
            report.max_echo_jump = std::max(report.max_echo_jump, jump);
        }
        double threshold = in_excitation ? excitation_threshold : echo_threshold;
        if (jump > threshold && !report.faulty) {
            report.faulty = true;
            report.first_violation_index = i;
        }
    }
    return report;
}

AScan subtract_head(const AScan& scan, const AScan& head) {
    if (!(scan.grid == head.grid))
        throw InvalidArgument("subtract_head: scan and head grids differ");
    AScan out = scan;
    for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= head.samples[i];
    return out;
}

ExcitationPulse smooth_excitation(const ExcitationPulse& pulse, double cutoff_mhz,
                                  double taper_fraction) {
    const TimeGrid& grid = pulse.grid;
    const int N = grid.n_samples;
    const double nyquist = 0.5 / grid.dt;
    if (!(cutoff_mhz > 0.0) || !(cutoff_mhz < nyquist))
        throw InvalidArgument("smooth_excitation: cutoff must lie in (0, Nyquist)");
    if (!(taper_fraction > 0.0) || taper_fraction > 1.0)
        throw InvalidArgument("smooth_excitation: taper fraction must be in (0, 1]");

    std::vector<double> out_samples(N);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        double* buf = fftw_alloc_real(N);
        fftw_complex* spec = fftw_alloc_complex(N / 2 + 1);
        fftw_plan fwd = fftw_plan_dft_r2c_1d(N, buf, spec, FFTW_ESTIMATE);
        fftw_plan bwd = fftw_plan_dft_c2r_1d(N, spec, buf, FFTW_ESTIMATE);

        std::copy(pulse.samples.begin(), pulse.samples.end(), buf);
        fftw_execute(fwd);

        const double flat = (1.0 - taper_fraction) * cutoff_mhz;
        for (int j = 0; j <= N / 2; ++j) {
            double f = j / (N * grid.dt);  // MHz
            double w;
            if (f <= flat)
                w = 1.0;
            else if (f < cutoff_mhz)
                w = 0.5 * (1.0 + std::cos(M_PI * (f - flat) / (cutoff_mhz - flat)));
            else
                w = 0.0;
            spec[j][0] *= w;
            spec[j][1] *= w;
        }

        fftw_execute(bwd);
        for (int i = 0; i < N; ++i) out_samples[i] = buf[i] / N;

        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
        fftw_free(spec);
    }

    // The filter rings slightly outside the original support; the drive model
    // requires silence at t = 0 and from t_ex on, so clamp it back.
    for (int i = 0; i < N; ++i) {
        if (grid.time(i) >= pulse.t_ex) out_samples[i] = 0.0;
    }
    out_samples[0] = 0.0;

    return make_excitation_pulse(grid, std::move(out_samples), pulse.t_ex);
}

}  // namespace ascan
