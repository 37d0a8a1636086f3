// Acceptance checks for the full library: each criterion exercises one
// externally visible guarantee end to end, at the standard instrument
// settings wherever runtime allows, and prints a single [PASS]/[FAIL] line.
// Run all of them with no arguments or one with --criterion N.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "ascan/bayes.hpp"
#include "ascan/calibrate.hpp"
#include "ascan/cli_io.hpp"
#include "ascan/damage_test.hpp"
#include "ascan/errors.hpp"
#include "ascan/features.hpp"
#include "ascan/preprocess.hpp"
#include "ascan/rng.hpp"
#include "ascan/signal_core.hpp"
#include "ascan/synth_oracle.hpp"
#include "ascan/telegraph_solver.hpp"
#include "helpers.hpp"

using namespace ascan;
using ascan_test::max_abs;
using ascan_test::modal_energy;
using ascan_test::rel_linf;
using ascan_test::split_rhat;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string num(double v, int digits = 3) {
    std::ostringstream out;
    out << std::setprecision(digits) << v;
    return out.str();
}

// The (b, c) sample of the admissible box shared by several criteria:
// corners, edge midpoints, and center.
std::vector<MaterialParams> box_grid3x3(const PriorBox& box) {
    std::vector<MaterialParams> points;
    for (double b : {box.b_min, 0.5 * (box.b_min + box.b_max), box.b_max})
        for (double c : {box.c_min, 0.5 * (box.c_min + box.c_max), box.c_max})
            points.push_back({b, c});
    return points;
}

// Depth step used where a criterion needs hundreds of forward solves or
// chain evaluations. Criterion 3 pins the fits at this step against the
// standard 0.001 so the substitution is checked, not assumed.
constexpr double kCoarseDz = 0.005;

AScan with_noise(const AScan& clean, double sigma, uint64_t seed) {
    AScan noisy = clean;
    Rng rng(seed);
    for (double& s : noisy.samples) s += sigma * rng.normal();
    return noisy;
}

// ---------------------------------------------------------------------------
// 1. Forward solver vs the finite-difference reference march.

Outcome criterion1() {
    Stopwatch timer;
    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    Solver solver(pulse, cfg.plate(), cfg.grid(), cfg.solver());
    PlateModel fd_plate = make_plate_model(cfg.plate_length, kCoarseDz);

    double worst = 0.0;
    MaterialParams worst_at{0.0, 0.0};
    for (const MaterialParams& p : box_grid3x3(cfg.box())) {
        AScan model = solver.forward(p);
        FdtdSolution fd = fdtd_solve(p, pulse, fd_plate, cfg.grid(), {8, 0});
        double err = rel_linf(model.samples, fd.surface.samples);
        if (err > worst) {
            worst = err;
            worst_at = p;
        }
    }

    double secs = timer.seconds();
    Outcome out;
    out.pass = worst < 0.02 && secs < 120.0;
    out.detail = "max rel err " + num(worst) + " at b=" + num(worst_at.b) +
                 " c=" + num(worst_at.c) + " (limit 0.02), " + num(secs, 3) +
                 " s (limit 120)";
    return out;
}

// ---------------------------------------------------------------------------
// 2. Internal consistency: value and slope continuity at the handoff,
//    energy conservation without damping, vanishing imaginary residue.

Outcome criterion2() {
    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    TimeGrid grid = cfg.grid();

    SolverOptions options = cfg.solver();
    options.collect_diagnostics = true;
    Solver solver(pulse, cfg.plate(), grid, options);

    int i_ex = grid.index_at_or_before(cfg.t_ex);
    double drive_value = pulse.samples[i_ex];
    double drive_slope = (pulse.samples[i_ex] - pulse.samples[i_ex - 1]) / grid.dt;

    double worst_value = 0.0, worst_slope = 0.0, worst_imag = 0.0;
    for (const MaterialParams& p : box_grid3x3(cfg.box())) {
        EchoState state = solver.excitation_state(p);
        worst_value = std::max(worst_value, std::fabs(state.w0[0] - drive_value));
        worst_slope = std::max(worst_slope, std::fabs(state.w0_t[0] - drive_slope));
        worst_imag = std::max(worst_imag, solver.diagnostics().max_imag_residue);
    }

    // Mode-expansion energy over the echo phase at b = 0.
    MaterialParams undamped{0.0, 0.224};
    Solver plain(pulse, cfg.plate(), grid, cfg.solver());
    EchoState state = plain.excitation_state(undamped);
    double e0 = modal_energy(state, undamped.c, cfg.plate_length);
    double series_drift = 0.0;
    double t_last = grid.time(grid.n_samples - 1);
    for (int k = 1; k <= 8; ++k) {
        double t = cfg.t_ex + k * (t_last - cfg.t_ex) / 8.0;
        EchoState snap = echo_field_at(state, undamped, cfg.plate(), cfg.t_ex, t);
        double e = modal_energy(snap, undamped.c, cfg.plate_length);
        series_drift = std::max(series_drift, std::fabs(e / e0 - 1.0));
    }

    // Discrete energy of the finite-difference march, same material.
    PlateModel fd_plate = make_plate_model(cfg.plate_length, kCoarseDz);
    FdtdSolution fd = fdtd_solve(undamped, pulse, fd_plate, grid, {4, 50});
    double fd_ref = 0.0, fd_drift = 0.0;
    for (size_t i = 0; i < fd.energy_times.size(); ++i) {
        if (fd.energy_times[i] <= cfg.t_ex + 2.0 * grid.dt) continue;
        if (fd_ref == 0.0)
            fd_ref = fd.energy[i];
        else
            fd_drift = std::max(fd_drift, std::fabs(fd.energy[i] / fd_ref - 1.0));
    }

    Outcome out;
    out.pass = worst_value < 1e-6 && worst_slope < 1e-4 && series_drift < 1e-3 &&
               fd_ref > 0.0 && fd_drift < 5e-3 && worst_imag < 1e-10;
    out.detail = "handoff value " + num(worst_value) + " (limit 1e-6), slope " +
                 num(worst_slope) + " (limit 1e-4), energy drift " + num(series_drift) +
                 " series / " + num(fd_drift) + " grid (limits 1e-3, 5e-3), imag " +
                 num(worst_imag) + " (limit 1e-10)";
    return out;
}

// ---------------------------------------------------------------------------
// 3. Least-squares calibration: exact recovery from a clean trace, stable
//    recovery under sample noise, and agreement across depth steps.

Outcome criterion3() {
    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    MaterialParams truth{0.12, 0.224};
    MaterialParams start = cfg.start();
    PriorBox box = cfg.box();

    Solver fine(pulse, cfg.plate(), cfg.grid(), cfg.solver());
    AScan clean_fine = fine.forward(truth);
    CalibrationResult fit_fine = calibrate_scan(clean_fine, fine, start, box);
    double err_b = std::fabs(fit_fine.params.b - truth.b);
    double err_c = std::fabs(fit_fine.params.c - truth.c);
    bool noiseless_ok = err_b < 0.01 && err_c < 0.002;

    PlateModel coarse = make_plate_model(cfg.plate_length, kCoarseDz);
    Solver solver(pulse, coarse, cfg.grid(), cfg.solver());
    AScan clean = solver.forward(truth);
    CalibrationResult fit_coarse = calibrate_scan(clean, solver, start, box);
    double cross_b = std::fabs(fit_fine.params.b - fit_coarse.params.b);
    double cross_c = std::fabs(fit_fine.params.c - fit_coarse.params.c);
    bool cross_ok = cross_b < 2e-3 && cross_c < 2e-4;

    int recovered = 0;
    for (int trial = 0; trial < 50; ++trial) {
        AScan noisy = with_noise(clean, 0.01, derive_seed(42, trial, 0));
        CalibrationResult fit = calibrate_scan(noisy, solver, start, box);
        if (std::fabs(fit.params.b - truth.b) < 0.05 &&
            std::fabs(fit.params.c - truth.c) < 0.005)
            ++recovered;
    }

    Outcome out;
    out.pass = noiseless_ok && cross_ok && recovered >= 48;
    out.detail = "noiseless |db|=" + num(err_b) + " |dc|=" + num(err_c) +
                 " (limits 0.01, 0.002); depth-step shift " + num(cross_b) + "/" +
                 num(cross_c) + " (limits 2e-3, 2e-4); noisy trials " +
                 std::to_string(recovered) + "/50 (need 48)";
    return out;
}

// ---------------------------------------------------------------------------
// 4. Sampler vs quadrature on a truncated normal target.

struct Moments {
    double mean_b = 0.0, mean_c = 0.0;
    double var_b = 0.0, var_c = 0.0, cov_bc = 0.0;
};

Moments quadrature_moments(const PriorBox& box,
                           const std::function<double(double, double)>& log_density,
                           int n = 400) {
    double db = box.b_range() / (n - 1);
    double dc = box.c_range() / (n - 1);
    double mass = 0.0, sb = 0.0, sc = 0.0, sbb = 0.0, scc = 0.0, sbc = 0.0;
    for (int i = 0; i < n; ++i) {
        double b = box.b_min + i * db;
        double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < n; ++j) {
            double c = box.c_min + j * dc;
            double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            double w = wi * wj * std::exp(log_density(b, c));
            mass += w;
            sb += w * b;
            sc += w * c;
            sbb += w * b * b;
            scc += w * c * c;
            sbc += w * b * c;
        }
    }
    Moments m;
    m.mean_b = sb / mass;
    m.mean_c = sc / mass;
    m.var_b = sbb / mass - m.mean_b * m.mean_b;
    m.var_c = scc / mass - m.mean_c * m.mean_c;
    m.cov_bc = sbc / mass - m.mean_b * m.mean_c;
    return m;
}

Outcome criterion4() {
    Stopwatch timer;
    PriorBox box;
    const double mb = 0.325, mc = 0.225, sb = 0.07, sc = 0.009, rho = 0.3;
    auto log_density = [&](double b, double c) {
        double zb = (b - mb) / sb, zc = (c - mc) / sc;
        return -0.5 * (zb * zb - 2.0 * rho * zb * zc + zc * zc) / (1.0 - rho * rho);
    };
    auto log_target = [&](const MaterialParams& p) { return log_density(p.b, p.c); };
    Moments q = quadrature_moments(box, log_density);

    const int n_chains = 4;
    std::vector<std::vector<double>> chains_b(n_chains), chains_c(n_chains);
    std::vector<double> half_means_b, half_means_c;
    std::vector<double> all_b, all_c;
    for (int k = 0; k < n_chains; ++k) {
        ChainOptions options;
        options.n_samples = 20000;
        options.seed = 401 + k;
        PosteriorChain chain = run_chain(log_target, box, options);
        for (const MaterialParams& s : chain.samples) {
            chains_b[k].push_back(s.b);
            chains_c[k].push_back(s.c);
            all_b.push_back(s.b);
            all_c.push_back(s.c);
        }
        size_t half = chain.samples.size() / 2;
        auto mean_of = [](const std::vector<double>& v, size_t lo, size_t hi) {
            double acc = 0.0;
            for (size_t i = lo; i < hi; ++i) acc += v[i];
            return acc / (hi - lo);
        };
        half_means_b.push_back(mean_of(chains_b[k], 0, half));
        half_means_b.push_back(mean_of(chains_b[k], half, chains_b[k].size()));
        half_means_c.push_back(mean_of(chains_c[k], 0, half));
        half_means_c.push_back(mean_of(chains_c[k], half, chains_c[k].size()));
    }

    // Standard error of the pooled mean from the spread of the eight
    // half-chain means; this absorbs the autocorrelation of the walk.
    auto batch_se = [](const std::vector<double>& means, double& grand) {
        grand = 0.0;
        for (double m : means) grand += m;
        grand /= means.size();
        double acc = 0.0;
        for (double m : means) acc += (m - grand) * (m - grand);
        return std::sqrt(acc / (means.size() - 1) / means.size());
    };
    double mean_b = 0.0, mean_c = 0.0;
    double se_b = batch_se(half_means_b, mean_b);
    double se_c = batch_se(half_means_c, mean_c);

    size_t n = all_b.size();
    double vbb = 0.0, vcc = 0.0, vbc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        vbb += (all_b[i] - mean_b) * (all_b[i] - mean_b);
        vcc += (all_c[i] - mean_c) * (all_c[i] - mean_c);
        vbc += (all_b[i] - mean_b) * (all_c[i] - mean_c);
    }
    vbb /= n - 1;
    vcc /= n - 1;
    vbc /= n - 1;

    double rhat_b = split_rhat(chains_b);
    double rhat_c = split_rhat(chains_c);
    double secs = timer.seconds();

    double dev_b = std::fabs(mean_b - q.mean_b) / se_b;
    double dev_c = std::fabs(mean_c - q.mean_c) / se_c;
    double rel_vbb = std::fabs(vbb - q.var_b) / q.var_b;
    double rel_vcc = std::fabs(vcc - q.var_c) / q.var_c;
    double rel_vbc = std::fabs(vbc - q.cov_bc) / std::fabs(q.cov_bc);

    Outcome out;
    out.pass = dev_b < 3.0 && dev_c < 3.0 && rel_vbb < 0.10 && rel_vcc < 0.10 &&
               rel_vbc < 0.10 && rhat_b < 1.05 && rhat_c < 1.05 && secs < 30.0;
    out.detail = "mean off by " + num(dev_b) + "/" + num(dev_c) +
                 " se (limit 3); cov rel err " + num(rel_vbb) + "/" + num(rel_vcc) +
                 "/" + num(rel_vbc) + " (limit 0.1); split statistic " + num(rhat_b, 4) +
                 "/" + num(rhat_c, 4) + " (limit 1.05); " + num(secs, 3) +
                 " s (limit 30)";
    return out;
}

// ---------------------------------------------------------------------------
// 5. Coverage of the central 95% credible region over seeded replications.

Outcome criterion5() {
    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    TimeGrid grid = cfg.grid();
    PlateModel coarse = make_plate_model(cfg.plate_length, kCoarseDz);
    EchoWindow window = cfg.window();
    PriorBox box = cfg.box();
    MaterialParams truth{0.12, 0.224};

    SyntheticPlateSpec ref_spec;
    ref_spec.nx = 8;
    ref_spec.ny = 8;
    ref_spec.base = truth;
    ref_spec.noise_sigma = 0.01;
    ref_spec.seed = 5;
    ScanSet reference = make_synthetic_plate(ref_spec, pulse, coarse, grid);
    std::array<int, 3> bins = select_dominant_bins(reference, window, cfg.max_feature_freq_mhz);
    FeatureCovariance cov = estimate_covariance(reference, window, bins);

    Solver solver(pulse, coarse, grid, cfg.solver());
    AScan clean = solver.forward(truth);
    std::vector<int> bin_list(bins.begin(), bins.end());
    auto model = [&](const MaterialParams& p) {
        auto coeffs = solver.trace_bins(p, bin_list, window.t_lo, window.t_hi);
        return features_from_bins({coeffs[0], coeffs[1], coeffs[2]}, bins);
    };

    int covered = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        AScan scan = with_noise(clean, 0.01, derive_seed(7, rep, 0));
        FeatureVector measured = extract_features(scan, window, bins);
        ChainOptions options = cfg.chain();
        options.seed = derive_seed(7, rep, 1);
        PosteriorChain chain = run_chain(model, measured, cov, box, options);
        PosteriorSummary summary = posterior_summary(chain);

        // Central 95% region of the density estimate: everything denser than
        // the 5% quantile of the sample densities.
        std::vector<double> density(chain.samples.size());
        for (size_t i = 0; i < chain.samples.size(); ++i)
            density[i] = summary.kde.density(chain.samples[i].b, chain.samples[i].c);
        double threshold = empirical_quantile(density, 0.05);
        if (summary.kde.density(truth.b, truth.c) >= threshold) ++covered;
    }

    Outcome out;
    out.pass = covered >= 90;
    out.detail = "truth inside the 95% region in " + std::to_string(covered) + "/" +
                 std::to_string(reps) + " replications (need 90)";
    return out;
}

// ---------------------------------------------------------------------------
// 6 and 7 share one synthetic-plate study: a healthy reference plate for the
// feature statistics and a patched plate that is calibrated per cell.

struct PlateStudy {
    SyntheticPlateSpec damaged_spec;
    ScanSet reference;
    ScanSet plate;
    ParameterMap map;
    std::vector<unsigned char> healthy_mask;  // nonzero outside the patch
    double calibrate_seconds = 0.0;
};

const PlateStudy& plate_study() {
    static const PlateStudy study = [] {
        RunConfig cfg;
        ExcitationPulse pulse = cfg.pulse();
        TimeGrid grid = cfg.grid();
        PlateModel coarse = make_plate_model(cfg.plate_length, kCoarseDz);

        PlateStudy s;
        SyntheticPlateSpec healthy;
        healthy.noise_sigma = 0.01;
        healthy.seed = 11;
        s.reference = make_synthetic_plate(healthy, pulse, coarse, grid);

        s.damaged_spec = healthy;
        s.damaged_spec.seed = 12;
        s.damaged_spec.patch_x0 = 8;
        s.damaged_spec.patch_y0 = 7;
        s.damaged_spec.patch_w = 4;
        s.damaged_spec.patch_h = 4;
        s.damaged_spec.delta_b = 0.15;
        s.damaged_spec.delta_c = -0.01;
        s.plate = make_synthetic_plate(s.damaged_spec, pulse, coarse, grid);

        Stopwatch timer;
        CalibrateGridOptions options;
        options.box = cfg.box();
        options.solver = cfg.solver();
        options.threads = 1;
        s.map = calibrate_grid(s.plate, pulse, coarse, cfg.start(), options);
        s.calibrate_seconds = timer.seconds();

        s.healthy_mask.assign(size_t(s.damaged_spec.nx) * s.damaged_spec.ny, 0);
        for (int iy = 0; iy < s.damaged_spec.ny; ++iy)
            for (int ix = 0; ix < s.damaged_spec.nx; ++ix)
                s.healthy_mask[size_t(iy) * s.damaged_spec.nx + ix] =
                    s.damaged_spec.in_patch(ix, iy) ? 0 : 1;
        return s;
    }();
    return study;
}

Outcome criterion6() {
    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    PlateModel coarse = make_plate_model(cfg.plate_length, kCoarseDz);
    EchoWindow window = cfg.window();

    const PlateStudy& study = plate_study();
    Stopwatch timer;
    Thresholds thresholds = derive_thresholds(study.map, study.healthy_mask,
                                              cfg.quantile_level,
                                              "undamaged cells of the patched plate");

    std::array<int, 3> bins =
        select_dominant_bins(study.reference, window, cfg.max_feature_freq_mhz);
    FeatureCovariance cov = estimate_covariance(study.reference, window, bins);

    DamageTestOptions options;
    options.window = window;
    options.chain = cfg.chain();
    options.chain.seed = 6001;
    options.level = cfg.rejection_level;
    options.solver = cfg.solver();
    options.threads = 1;
    ProbabilityMap prob =
        test_grid(study.plate, thresholds, cfg.box(), cov, pulse, coarse, options);

    int patch_total = 0, patch_rejected = 0;
    int healthy_total = 0, healthy_rejected = 0, unreliable = 0;
    for (int iy = 0; iy < prob.ny; ++iy) {
        for (int ix = 0; ix < prob.nx; ++ix) {
            if (!prob.has(ix, iy)) continue;
            const TestResult& r = prob.at(ix, iy);
            if (r.unreliable) ++unreliable;
            if (study.damaged_spec.in_patch(ix, iy)) {
                ++patch_total;
                if (r.rejected) ++patch_rejected;
            } else {
                ++healthy_total;
                if (r.rejected) ++healthy_rejected;
            }
        }
    }
    double secs = study.calibrate_seconds + timer.seconds();
    double false_rate = healthy_total > 0 ? double(healthy_rejected) / healthy_total : 1.0;

    Outcome out;
    out.pass = patch_total == 16 && patch_rejected == patch_total && false_rate <= 0.03 &&
               secs < 1800.0;
    out.detail = "patch " + std::to_string(patch_rejected) + "/" +
                 std::to_string(patch_total) + " rejected (need all 16); false alarms " +
                 std::to_string(healthy_rejected) + "/" + std::to_string(healthy_total) +
                 " = " + num(100.0 * false_rate) + "% (limit 3%); unreliable " +
                 std::to_string(unreliable) + "; b_crit=" + num(thresholds.b_crit) +
                 " c_crit=" + num(thresholds.c_crit) + "; " + num(secs, 4) +
                 " s single-threaded (limit 1800)";
    return out;
}

Outcome criterion7() {
    const PlateStudy& study = plate_study();

    double base_n = 0.0, base_mb = 0.0, base_mc = 0.0;
    double patch_n = 0.0, patch_mb = 0.0, patch_mc = 0.0;
    for (int iy = 0; iy < study.map.ny; ++iy) {
        for (int ix = 0; ix < study.map.nx; ++ix) {
            if (!study.map.has(ix, iy)) continue;
            const CalibrationResult& fit = study.map.at(ix, iy);
            if (study.damaged_spec.in_patch(ix, iy)) {
                ++patch_n;
                patch_mb += fit.params.b;
                patch_mc += fit.params.c;
            } else {
                ++base_n;
                base_mb += fit.params.b;
                base_mc += fit.params.c;
            }
        }
    }
    base_mb /= base_n;
    base_mc /= base_n;
    patch_mb /= patch_n;
    patch_mc /= patch_n;

    double sd_b = 0.0, sd_c = 0.0;
    for (int iy = 0; iy < study.map.ny; ++iy) {
        for (int ix = 0; ix < study.map.nx; ++ix) {
            if (!study.map.has(ix, iy) || study.damaged_spec.in_patch(ix, iy)) continue;
            const CalibrationResult& fit = study.map.at(ix, iy);
            sd_b += (fit.params.b - base_mb) * (fit.params.b - base_mb);
            sd_c += (fit.params.c - base_mc) * (fit.params.c - base_mc);
        }
    }
    sd_b = std::sqrt(sd_b / (base_n - 1.0));
    sd_c = std::sqrt(sd_c / (base_n - 1.0));

    double shift_b = (patch_mb - base_mb) / sd_b;
    double shift_c = (base_mc - patch_mc) / sd_c;

    Outcome out;
    out.pass = shift_b > 5.0 && shift_c > 5.0;
    out.detail = "patch damping mean up by " + num(shift_b) +
                 " reference sd, wave speed down by " + num(shift_c) +
                 " reference sd (need > 5 each); base fits b=" + num(base_mb) +
                 " c=" + num(base_mc, 4) + ", patch fits b=" + num(patch_mb) +
                 " c=" + num(patch_mc, 4);
    return out;
}

// ---------------------------------------------------------------------------
// 8. Preprocessing: jump screening recall and false-positive rate, exact
//    head subtraction, smoothing idempotence.

Outcome criterion8() {
    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    TimeGrid grid = cfg.grid();
    PlateModel coarse = make_plate_model(cfg.plate_length, kCoarseDz);

    SyntheticPlateSpec spec;
    spec.nx = 20;
    spec.ny = 10;
    spec.noise_sigma = 0.01;
    spec.seed = 21;
    ScanSet scans = make_synthetic_plate(spec, pulse, coarse, grid);

    int false_positives = 0, caught = 0, total = 0;
    int echo_start = grid.index_at_or_before(cfg.t_ex) + 1;
    Rng rng(334);
    for (int iy = 0; iy < spec.ny; ++iy) {
        for (int ix = 0; ix < spec.nx; ++ix) {
            const AScan& scan = scans.at(ix, iy);
            ++total;
            if (detect_faulty(scan, cfg.t_ex).faulty) ++false_positives;

            AScan broken = scan;
            int span = grid.n_samples - echo_start;
            int idx = echo_start + std::min(span - 1, int(rng.uniform01() * span));
            double magnitude = 0.5 + 0.5 * rng.uniform01();
            broken.samples[idx] += rng.uniform01() < 0.5 ? -magnitude : magnitude;
            if (detect_faulty(broken, cfg.t_ex).faulty) ++caught;
        }
    }

    const AScan& probe = scans.at(0, 0);
    double self_residual = max_abs(subtract_head(probe, probe).samples);

    // A pulse whose spectrum is already far below the low-pass roll-off by
    // construction: smoothing it once must be transparent, twice idempotent.
    std::vector<double> samples(grid.n_samples, 0.0);
    for (int i = 1; i < grid.n_samples; ++i) {
        double t = grid.time(i);
        if (t >= 10.0) break;
        double arg = (t - 5.0) / 0.6;
        samples[i] = std::exp(-0.5 * arg * arg) * std::sin(2.0 * M_PI * (t - 5.0));
    }
    ExcitationPulse atom = make_excitation_pulse(grid, std::move(samples), 10.0);
    ExcitationPulse once = smooth_excitation(atom, cfg.smooth_cutoff_mhz, cfg.smooth_taper);
    ExcitationPulse twice = smooth_excitation(once, cfg.smooth_cutoff_mhz, cfg.smooth_taper);
    double idem = 0.0;
    for (int i = 0; i < grid.n_samples; ++i)
        idem = std::max(idem, std::fabs(twice.samples[i] - once.samples[i]));

    Outcome out;
    out.pass = false_positives == 0 && caught == total && self_residual == 0.0 &&
               idem < 1e-12;
    out.detail = "clean scans flagged " + std::to_string(false_positives) + "/" +
                 std::to_string(total) + " (need 0); injected jumps caught " +
                 std::to_string(caught) + "/" + std::to_string(total) +
                 " (need all); self-subtraction residual " + num(self_residual) +
                 " (need 0); smoothing idempotence " + num(idem) + " (limit 1e-12)";
    return out;
}

// ---------------------------------------------------------------------------
// 9. Byte-stable files and a bit-reproducible pipeline.

int cli(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("ascan");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

// The whole small-plate pipeline into one directory; returns the artifact
// paths so reruns can be compared file by file.
std::vector<std::string> run_pipeline(const std::string& dir) {
    std::vector<std::string> geometry = {
        "--dt", "0.005", "--samples", "2800", "--t-ex", "5", "--plate-dz", "0.01",
    };
    auto with = [&](std::vector<std::string> args) {
        std::vector<std::string> full = geometry;
        full.insert(full.end(), args.begin(), args.end());
        return full;
    };
    if (cli(with({"simulate", "--nx", "3", "--ny", "3", "--noise-sigma", "0.005",
                  "--noise-seed", "11", "-o", dir + "ref.scans"})) != 0)
        throw NumericalError("pipeline: simulate reference failed");
    if (cli(with({"simulate", "--nx", "2", "--ny", "1", "--patch-x0", "1", "--patch-y0",
                  "0", "--patch-w", "1", "--patch-h", "1", "--delta-b", "0.18",
                  "--delta-c", "-0.012", "--noise-sigma", "0.005", "--noise-seed", "12",
                  "-o", dir + "plate.scans"})) != 0)
        throw NumericalError("pipeline: simulate plate failed");
    if (cli(with({"preprocess", dir + "plate.scans", "-o", dir + "clean.scans"})) != 0)
        throw NumericalError("pipeline: preprocess failed");
    if (cli(with({"calibrate", dir + "clean.scans", "-o", dir + "c.csv", "--out-b",
                  dir + "b.csv", "--threads", "1"})) != 0)
        throw NumericalError("pipeline: calibrate failed");
    if (cli(with({"render", dir + "c.csv", "-o", dir + "c.pgm"})) != 0)
        throw NumericalError("pipeline: render failed");
    if (cli(with({"posterior", dir + "plate.scans", "--reference", dir + "ref.scans",
                  "--location", "1,0", "--window-lo", "7", "--window-hi", "13.9",
                  "--burn-in", "50", "--chain-samples", "150", "--seed", "17", "-o",
                  dir + "chain.csv"})) != 0)
        throw NumericalError("pipeline: posterior failed");
    if (cli(with({"test", dir + "plate.scans", "--reference", dir + "ref.scans",
                  "--window-lo", "7", "--window-hi", "13.9", "--b-crit", "0.18",
                  "--c-crit", "0.219", "--burn-in", "50", "--chain-samples", "150",
                  "--seed", "17", "--threads", "1", "-o", dir + "p.csv"})) != 0)
        throw NumericalError("pipeline: test failed");
    return {dir + "ref.scans",  dir + "plate.scans", dir + "clean.scans",
            dir + "c.csv",      dir + "b.csv",       dir + "c.pgm",
            dir + "chain.csv",  dir + "chain_kde.csv", dir + "p.csv",
            dir + "p_rejected.csv"};
}

Outcome criterion9() {
    namespace fs = std::filesystem;
    fs::remove_all("acceptance_tmp");
    fs::create_directories("acceptance_tmp/files");
    fs::create_directories("acceptance_tmp/run_a");
    fs::create_directories("acceptance_tmp/run_b");
    const std::string files = "acceptance_tmp/files/";

    auto s = ascan_test::small_setup();
    Solver solver(s.pulse, s.plate, s.grid);
    ScanSet set(2, 2, 5.0, 4.0, 1.0, -2.0, "round-trip probe plate");
    set.set_t_ex(s.pulse.t_ex);
    set.set(0, 0, solver.forward({0.12, 0.224}));
    set.set(1, 0, solver.forward({0.3, 0.21}));
    set.set(1, 1, solver.forward({0.5, 0.24}));

    write_scan_set(set, files + "set_a.scans");
    ScanSet set_back = read_scan_set(files + "set_a.scans");
    write_scan_set(set_back, files + "set_b.scans");
    bool scans_ok = ascan_test::file_bytes(files + "set_a.scans") ==
                        ascan_test::file_bytes(files + "set_b.scans") &&
                    set_back.at(1, 0).samples == set.at(1, 0).samples;

    auto log_target = [](const MaterialParams& p) {
        double zb = (p.b - 0.3) / 0.05, zc = (p.c - 0.22) / 0.01;
        return -0.5 * (zb * zb + zc * zc);
    };
    ChainOptions chain_options;
    chain_options.burn_in = 50;
    chain_options.n_samples = 200;
    chain_options.seed = 99;
    PosteriorChain chain = run_chain(log_target, PriorBox{}, chain_options);
    write_chain(chain, files + "chain_a.csv");
    PosteriorChain chain_back = read_chain(files + "chain_a.csv");
    write_chain(chain_back, files + "chain_b.csv");
    bool chain_ok = ascan_test::file_bytes(files + "chain_a.csv") ==
                        ascan_test::file_bytes(files + "chain_b.csv") &&
                    chain_back.samples.size() == chain.samples.size();
    for (size_t i = 0; chain_ok && i < chain.samples.size(); ++i)
        chain_ok = chain_back.samples[i].b == chain.samples[i].b &&
                   chain_back.samples[i].c == chain.samples[i].c;

    MapCsv map;
    map.quantity = "wave_speed";
    map.units = "thickness/us";
    map.nx = 3;
    map.ny = 2;
    map.values = {0.224, std::nullopt, 0.21, 1.0 / 3.0, 0.2249999999999998, 0.25};
    write_map_csv(map, files + "map_a.csv");
    MapCsv map_back = read_map_csv(files + "map_a.csv");
    write_map_csv(map_back, files + "map_b.csv");
    bool map_ok = ascan_test::file_bytes(files + "map_a.csv") ==
                  ascan_test::file_bytes(files + "map_b.csv");

    std::vector<std::string> a = run_pipeline("acceptance_tmp/run_a/");
    std::vector<std::string> b = run_pipeline("acceptance_tmp/run_b/");
    int identical = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        std::string bytes = ascan_test::file_bytes(a[i]);
        if (!bytes.empty() && bytes == ascan_test::file_bytes(b[i])) ++identical;
    }
    bool pipeline_ok = identical == int(a.size());

    Outcome out;
    out.pass = scans_ok && chain_ok && map_ok && pipeline_ok;
    out.detail = std::string("scan set ") + (scans_ok ? "stable" : "UNSTABLE") +
                 ", chain " + (chain_ok ? "stable" : "UNSTABLE") + ", map " +
                 (map_ok ? "stable" : "UNSTABLE") + "; rerun artifacts identical " +
                 std::to_string(identical) + "/" + std::to_string(a.size());
    return out;
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "forward solver matches the finite-difference reference", criterion1},
    {2, "handoff continuity, energy conservation, spectral symmetry", criterion2},
    {3, "calibration recovers known parameters", criterion3},
    {4, "sampler reproduces a truncated-normal target", criterion4},
    {5, "posterior credible regions cover the truth", criterion5},
    {6, "damage test flags the damaged patch", criterion6},
    {7, "damaged-region fits shift in the physical direction", criterion7},
    {8, "fault screening, head subtraction, smoothing idempotence", criterion8},
    {9, "file round-trips and pipeline determinism", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (selected != 0 && (selected < 1 || selected > 9)) {
        std::fprintf(stderr, "no criterion %d; valid ids are 1..9\n", selected);
        return 2;
    }

    int failures = 0;
    for (const Criterion& criterion : kCriteria) {
        if (selected != 0 && criterion.id != selected) continue;
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("threw: ") + e.what();
        }
        std::printf("[%s] %d %s (%s)\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                    criterion.name, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
