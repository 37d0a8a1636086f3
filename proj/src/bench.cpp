#include "ascan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <sstream>
#include <thread>
#include <vector>

#include "ascan/bayes.hpp"
#include "ascan/cli_io.hpp"
#include "ascan/damage_test.hpp"
#include "ascan/features.hpp"
#include "ascan/telegraph_solver.hpp"

namespace ascan {

namespace {

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (word >> (8 * byte)) & 0xffu;
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

std::uint64_t trace_checksum(const AScan& scan) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::uint64_t word = 0;
    std::memcpy(&word, &scan.grid.dt, 8);
    fnv_mix(h, word);
    fnv_mix(h, static_cast<std::uint64_t>(scan.grid.n_samples));
    for (double v : scan.samples) {
        std::memcpy(&word, &v, 8);
        fnv_mix(h, word);
    }
    return h;
}

std::string machine_summary() {
    std::ostringstream out;
#if defined(__clang__)
    out << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
    out << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
    out << "unknown compiler";
#endif
    out << ", " << std::thread::hardware_concurrency() << " hardware threads";
    return out.str();
}

BenchReport bench_forward(int n_repeats) {
    if (n_repeats < 1) throw InvalidArgument("bench_forward: n_repeats must be positive");

    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    Solver solver(pulse, cfg.plate(), cfg.grid(), cfg.solver());
    MaterialParams params{0.12, 0.224};

    BenchReport report;
    report.name = "forward solve, 14000 samples, dz 0.001";
    report.repeats = n_repeats;
    report.checksum = trace_checksum(solver.forward(params));

    std::vector<double> times(n_repeats);
    for (int r = 0; r < n_repeats; ++r) {
        auto start = std::chrono::steady_clock::now();
        AScan trace = solver.forward(params);
        times[r] = elapsed_ms(start);
        if (trace_checksum(trace) != report.checksum)
            throw NumericalError("bench_forward: repeated solves disagree");
    }
    std::sort(times.begin(), times.end());
    report.median_ms = empirical_quantile(times, 0.5);
    report.p90_ms = empirical_quantile(times, 0.9);
    return report;
}

ChainBenchReport bench_chain_cache(int n_steps) {
    if (n_steps < 1) throw InvalidArgument("bench_chain_cache: n_steps must be positive");

    RunConfig cfg;
    ExcitationPulse pulse = cfg.pulse();
    PlateModel plate = cfg.plate();
    TimeGrid grid = cfg.grid();
    Solver solver(pulse, plate, grid, cfg.solver());
    EchoWindow window = cfg.window();

    MaterialParams truth{0.12, 0.224};
    AScan scan = solver.forward(truth);
    ScanSet one(1, 1, 1.0, 1.0);
    one.set_t_ex(pulse.t_ex);
    one.set(0, 0, scan);
    std::array<int, 3> bins = select_dominant_bins(one, window, cfg.max_feature_freq_mhz);
    FeatureVector measured = extract_features(scan, window, bins);

    // The covariance is a stand-in; only the evaluation cost matters here.
    FeatureCovariance cov;
    cov.bins = bins;
    for (int i = 0; i < 6; ++i) cov.sigma[i][i] = 1e-4;

    std::vector<int> bin_list(bins.begin(), bins.end());
    auto model = [&](const MaterialParams& p) {
        auto coeffs = solver.trace_bins(p, bin_list, window.t_lo, window.t_hi);
        return features_from_bins({coeffs[0], coeffs[1], coeffs[2]}, bins);
    };

    ChainOptions options = cfg.chain();
    options.burn_in = 0;
    options.n_samples = n_steps;
    options.seed = 20240901;

    ChainBenchReport report;
    report.steps = n_steps;

    options.cache_current = true;
    auto start = std::chrono::steady_clock::now();
    PosteriorChain cached = run_chain(model, measured, cov, cfg.box(), options);
    report.cached_ms = elapsed_ms(start);

    options.cache_current = false;
    start = std::chrono::steady_clock::now();
    PosteriorChain uncached = run_chain(model, measured, cov, cfg.box(), options);
    report.uncached_ms = elapsed_ms(start);

    report.speedup = report.cached_ms > 0.0 ? report.uncached_ms / report.cached_ms : 0.0;
    report.identical_samples = cached.samples.size() == uncached.samples.size();
    if (report.identical_samples) {
        for (size_t i = 0; i < cached.samples.size(); ++i) {
            if (cached.samples[i].b != uncached.samples[i].b ||
                cached.samples[i].c != uncached.samples[i].c) {
                report.identical_samples = false;
                break;
            }
        }
    }
    return report;
}

std::string to_markdown(const BenchReport& forward, const ChainBenchReport& chain) {
    std::ostringstream out;
    out << "# Benchmark\n\n";
    out << "Machine: " << machine_summary() << "\n\n";
    out << "| benchmark | repeats | median ms | p90 ms |\n";
    out << "|---|---|---|---|\n";
    out << "| " << forward.name << " | " << forward.repeats << " | " << forward.median_ms
        << " | " << forward.p90_ms << " |\n\n";
    out << "Chain with " << chain.steps << " steps: " << chain.cached_ms
        << " ms cached vs " << chain.uncached_ms << " ms uncached ("
        << chain.speedup << "x, samples "
        << (chain.identical_samples ? "identical" : "DIFFER") << ").\n";
    return out.str();
}

std::string to_csv(const BenchReport& forward, const ChainBenchReport& chain) {
    std::ostringstream out;
    out << "benchmark,repeats,median_ms,p90_ms\n";
    out << forward.name << "," << forward.repeats << "," << forward.median_ms << ","
        << forward.p90_ms << "\n";
    out << "chain_cache_speedup," << chain.steps << "," << chain.cached_ms << ","
        << chain.uncached_ms << "\n";
    return out.str();
}

}  // namespace ascan
