#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ascan/bayes.hpp"
#include "ascan/calibrate.hpp"
#include "ascan/damage_test.hpp"
#include "ascan/features.hpp"
#include "ascan/signal_core.hpp"
#include "ascan/telegraph_solver.hpp"

namespace ascan {

// Everything a pipeline run needs, with the standard instrument settings as
// defaults. Config files are flat `key = value` text (# comments allowed);
// keys match the field names here.
struct RunConfig {
    double dt = 0.0025;  // us
    int n_samples = 14000;
    double t_ex = 11.8;  // us
    double plate_length = 1.0;
    double plate_dz = 0.001;

    double pulse_freq_mhz = 1.0;
    double pulse_cycles = 4.0;
    double pulse_amplitude = 0.5;

    double smooth_cutoff_mhz = 6.5;
    double smooth_taper = 0.5;
    double echo_threshold = 0.25;
    double excitation_threshold = 1.0;

    double window_lo = 11.8;  // echo feature window, us
    double window_hi = 22.0;
    double max_feature_freq_mhz = 6.5;

    double b_min = 0.05;
    double b_max = 0.6;
    double c_min = 0.2;
    double c_max = 0.25;
    double start_b = 0.2;
    double start_c = 0.22;

    double eps_early = 0.02;
    double eps_late = 0.001;
    int switch_step = 100;
    int burn_in = 100;
    int chain_samples = 1000;
    std::uint64_t seed = 1;

    double quantile_level = 0.99;
    double rejection_level = 0.01;

    double solver_window_rate = -1.0;
    double solver_spectrum_cutoff = 1e-10;

    int threads = 0;

    TimeGrid grid() const;
    PlateModel plate() const;
    EchoWindow window() const;
    PriorBox box() const;
    MaterialParams start() const;
    ProposalSchedule schedule() const;
    SolverOptions solver() const;
    ChainOptions chain() const;

    // The excitation every stage shares: a Hann-windowed tone burst run
    // through the Tukey low-pass.
    ExcitationPulse pulse() const;

    bool operator==(const RunConfig&) const = default;
};

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);
void apply_config_file(RunConfig& config, const std::string& path);
void write_config(const RunConfig& config, const std::string& path);
RunConfig read_config(const std::string& path);

// Scan-set container format: human-readable text header, then the present
// scans' samples as little-endian float64 in row-major location order.
void write_scan_set(const ScanSet& set, const std::string& path);
ScanSet read_scan_set(const std::string& path);

// Chain format: CSV with the seed, box, and schedule in comment lines, so a
// chain file is replayable.
void write_chain(const PosteriorChain& chain, const std::string& path);
PosteriorChain read_chain(const std::string& path);

// One map quantity as a CSV matrix (row = y, column = x) with the quantity
// name, units, and shape in comment lines. Missing cells are empty fields.
struct MapCsv {
    std::string quantity;
    std::string units;
    int nx = 0;
    int ny = 0;
    std::vector<std::optional<double>> values;  // row-major, y outer

    int index(int ix, int iy) const;
};

MapCsv map_from_parameters(const ParameterMap& map, const std::string& quantity);
MapCsv map_from_probabilities(const ProbabilityMap& map, const std::string& quantity);
void write_map_csv(const MapCsv& map, const std::string& path);
MapCsv read_map_csv(const std::string& path);

// 8-bit graymap of the same matrix, normalized to the data range stated in
// its header comment. Missing cells render black.
void write_map_pgm(const MapCsv& map, const std::string& path);

// Pipeline driver. Subcommands: simulate, preprocess, calibrate, posterior,
// test, render. Returns the process exit code: 0 success, 2 usage or input
// validation, 1 runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace ascan
