#pragma once

#include <cstdint>
#include <string>

#include "ascan/signal_core.hpp"

namespace ascan {

// FNV-1a over the raw sample bits plus the grid, for cheap "did anything
// change" guards around benchmarks.
std::uint64_t trace_checksum(const AScan& scan);

// Compiler and core count. No timestamps, so reports are reproducible.
std::string machine_summary();

struct BenchReport {
    std::string name;
    int repeats = 0;
    double median_ms = 0.0;
    double p90_ms = 0.0;
    std::uint64_t checksum = 0;  // reference solve, identical before and after
};

// Wall time of the forward solve at the standard instrument grid (14000
// samples at 0.0025 us, depth step 0.001). Informational only; the checksum
// of a reference solve is verified unchanged by the timing runs.
BenchReport bench_forward(int n_repeats);

struct ChainBenchReport {
    int steps = 0;
    double cached_ms = 0.0;    // carrying the current state's log-density
    double uncached_ms = 0.0;  // recomputing it every step
    double speedup = 0.0;      // uncached_ms / cached_ms
    bool identical_samples = false;  // same seed gave the same chain both ways
};

// A/B cost of caching the current state's model evaluation in the sampler,
// on a real forward-model posterior.
ChainBenchReport bench_chain_cache(int n_steps);

std::string to_markdown(const BenchReport& forward, const ChainBenchReport& chain);
std::string to_csv(const BenchReport& forward, const ChainBenchReport& chain);

}  // namespace ascan
