#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ascan/bayes.hpp"
#include "ascan/calibrate.hpp"
#include "ascan/cli_io.hpp"
#include "ascan/damage_test.hpp"
#include "ascan/errors.hpp"
#include "ascan/features.hpp"
#include "ascan/preprocess.hpp"
#include "ascan/rng.hpp"
#include "ascan/synth_oracle.hpp"
#include "ascan/telegraph_solver.hpp"

namespace ascan {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "out.csv" -> "out_rejected.csv"
std::string with_suffix(const std::string& path, const std::string& suffix) {
    size_t slash = path.find_last_of('/');
    size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

std::pair<int, int> parse_location(const std::string& text) {
    size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw InvalidArgument("--location expects 'ix,iy', got '" + text + "'");
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw InvalidArgument("--location expects 'ix,iy', got '" + text + "'");
    }
}

// Record geometry in a file wins over flags, like --config does.
void adopt_geometry(RunConfig& cfg, const ScanSet& set) {
    cfg.dt = set.grid().dt;
    cfg.n_samples = set.grid().n_samples;
    if (set.t_ex() > 0.0) cfg.t_ex = set.t_ex();
}

void apply_plate_entry(SyntheticPlateSpec& spec, std::string& label,
                       const std::string& key, const std::string& value) {
    auto d = [&] {
        char* end = nullptr;
        double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0')
            throw CorruptInput("plate key '" + key + "': expected a number, got '" +
                               value + "'");
        return v;
    };
    auto i = [&] { return static_cast<int>(d()); };

    if (key == "nx") spec.nx = i();
    else if (key == "ny") spec.ny = i();
    else if (key == "dx_mm") spec.dx_mm = d();
    else if (key == "dy_mm") spec.dy_mm = d();
    else if (key == "base_b") spec.base.b = d();
    else if (key == "base_c") spec.base.c = d();
    else if (key == "patch_x0") spec.patch_x0 = i();
    else if (key == "patch_y0") spec.patch_y0 = i();
    else if (key == "patch_w") spec.patch_w = i();
    else if (key == "patch_h") spec.patch_h = i();
    else if (key == "delta_b") spec.delta_b = d();
    else if (key == "delta_c") spec.delta_c = d();
    else if (key == "noise_sigma") spec.noise_sigma = d();
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "label") label = value;
    else throw CorruptInput("unknown plate key '" + key + "'");
}

void apply_plate_file(SyntheticPlateSpec& spec, std::string& label,
                      const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos || line[a] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw CorruptInput(path + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
        auto strip = [](std::string s) {
            size_t x = s.find_first_not_of(" \t");
            size_t y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        try {
            apply_plate_entry(spec, label, strip(line.substr(0, eq)),
                              strip(line.substr(eq + 1)));
        } catch (const CorruptInput& e) {
            throw CorruptInput(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

struct FeatureModel {
    EchoWindow window;
    std::array<int, 3> bins{};
    FeatureCovariance cov;
};

// Dominant bins and feature covariance of a reference (healthy) scan set,
// shared by `posterior` and `test`.
FeatureModel reference_model(const ScanSet& reference, const RunConfig& cfg) {
    FeatureModel m;
    m.window = cfg.window();
    m.bins = select_dominant_bins(reference, m.window, cfg.max_feature_freq_mhz);
    m.cov = estimate_covariance(reference, m.window, m.bins);
    return m;
}

int cmd_simulate(RunConfig cfg, SyntheticPlateSpec spec, const std::string& label,
                 const std::string& out) {
    TimeGrid grid = cfg.grid();
    PlateModel plate = cfg.plate();
    ExcitationPulse pulse = cfg.pulse();
    ScanSet set = make_synthetic_plate(spec, pulse, plate, grid);
    if (!label.empty()) set.set_label(label);
    write_scan_set(set, out);
    std::cout << "wrote " << set.count_present() << " scans (" << set.nx() << " x "
              << set.ny() << ") to " << out << "\n";
    return 0;
}

int cmd_preprocess(RunConfig cfg, const std::string& in_path, const std::string& out,
                   bool counts, const std::string& head_path, bool keep_faulty) {
    ScanSet set = read_scan_set(in_path);
    adopt_geometry(cfg, set);

    if (counts) {
        for (int iy = 0; iy < set.ny(); ++iy) {
            for (int ix = 0; ix < set.nx(); ++ix) {
                if (!set.has(ix, iy)) continue;
                const AScan& scan = set.at(ix, iy);
                RawScan raw;
                raw.grid = scan.grid;
                raw.x_mm = scan.x_mm;
                raw.y_mm = scan.y_mm;
                raw.counts.resize(scan.samples.size());
                for (size_t k = 0; k < scan.samples.size(); ++k) {
                    double v = scan.samples[k];
                    double r = std::nearbyint(v);
                    if (!(std::fabs(v - r) <= 1e-9))
                        throw CorruptInput("location " + std::to_string(ix) + "," +
                                           std::to_string(iy) + " sample " +
                                           std::to_string(k) +
                                           " is not an integer count");
                    raw.counts[k] = static_cast<int>(r);
                }
                set.set(ix, iy, normalize(raw));
            }
        }
    }

    if (!head_path.empty()) {
        ScanSet head = read_scan_set(head_path);
        const AScan* single = nullptr;
        if (head.count_present() == 1) {
            for (int iy = 0; iy < head.ny() && !single; ++iy)
                for (int ix = 0; ix < head.nx() && !single; ++ix)
                    if (head.has(ix, iy)) single = &head.at(ix, iy);
        }
        for (int iy = 0; iy < set.ny(); ++iy) {
            for (int ix = 0; ix < set.nx(); ++ix) {
                if (!set.has(ix, iy)) continue;
                const AScan* ref = single;
                if (!ref) {
                    if (ix >= head.nx() || iy >= head.ny() || !head.has(ix, iy))
                        throw InvalidArgument("head reference has no scan at " +
                                              std::to_string(ix) + "," +
                                              std::to_string(iy));
                    ref = &head.at(ix, iy);
                }
                set.set(ix, iy, subtract_head(set.at(ix, iy), *ref));
            }
        }
    }

    int dropped = 0;
    for (int iy = 0; iy < set.ny(); ++iy) {
        for (int ix = 0; ix < set.nx(); ++ix) {
            if (!set.has(ix, iy)) continue;
            FaultReport report = detect_faulty(set.at(ix, iy), cfg.t_ex,
                                               cfg.echo_threshold,
                                               cfg.excitation_threshold);
            if (!report.faulty) continue;
            std::cout << "faulty scan at " << ix << "," << iy << ": jump at sample "
                      << report.first_violation_index << "\n";
            if (!keep_faulty) {
                set.unset(ix, iy);
                ++dropped;
            }
        }
    }
    if (set.count_present() == 0)
        throw InsufficientData("preprocess dropped every scan");
    write_scan_set(set, out);
    std::cout << "kept " << set.count_present() << " scans, dropped " << dropped
              << ", wrote " << out << "\n";
    return 0;
}

int cmd_calibrate(RunConfig cfg, const std::string& in_path, const std::string& out_c,
                  const std::string& out_b, const std::string& out_misfit,
                  const std::string& out_status) {
    ScanSet set = read_scan_set(in_path);
    adopt_geometry(cfg, set);

    CalibrateGridOptions options;
    options.box = cfg.box();
    options.solver = cfg.solver();
    options.echo_threshold = cfg.echo_threshold;
    options.excitation_threshold = cfg.excitation_threshold;
    options.threads = cfg.threads;
    ParameterMap map = calibrate_grid(set, cfg.pulse(), cfg.plate(), cfg.start(), options);

    write_map_csv(map_from_parameters(map, "c"), out_c);
    if (!out_b.empty()) write_map_csv(map_from_parameters(map, "b"), out_b);
    if (!out_misfit.empty()) write_map_csv(map_from_parameters(map, "misfit"), out_misfit);
    if (!out_status.empty()) write_map_csv(map_from_parameters(map, "status"), out_status);

    int counts[4] = {0, 0, 0, 0};
    for (CellStatus s : map.status) ++counts[static_cast<int>(s)];
    std::cout << "calibrated " << counts[static_cast<int>(CellStatus::ok)] << " cells ("
              << counts[static_cast<int>(CellStatus::missing_scan)] << " missing, "
              << counts[static_cast<int>(CellStatus::faulty)] << " faulty, "
              << counts[static_cast<int>(CellStatus::failed)] << " failed), wrote "
              << out_c << "\n";
    return 0;
}

int cmd_posterior(RunConfig cfg, const std::string& in_path, const std::string& ref_path,
                  const std::string& location, const std::string& out_chain,
                  std::string out_kde, int kde_n) {
    ScanSet set = read_scan_set(in_path);
    adopt_geometry(cfg, set);
    ScanSet reference = read_scan_set(ref_path);
    if (!(reference.grid() == set.grid()))
        throw InvalidArgument("reference and input scan sets use different time grids");

    auto [ix, iy] = parse_location(location);
    if (!set.has(ix, iy))
        throw InvalidArgument("no scan at location " + location);
    if (kde_n < 2) throw InvalidArgument("--kde-n must be at least 2");

    FeatureModel fm = reference_model(reference, cfg);
    FeatureVector measured = extract_features(set.at(ix, iy), fm.window, fm.bins);

    ExcitationPulse pulse = cfg.pulse();
    PlateModel plate = cfg.plate();
    Solver solver(pulse, plate, set.grid(), cfg.solver());
    std::vector<int> bin_list(fm.bins.begin(), fm.bins.end());
    std::array<int, 3> bins = fm.bins;
    EchoWindow window = fm.window;
    auto model = [&](const MaterialParams& p) {
        auto coeffs = solver.trace_bins(p, bin_list, window.t_lo, window.t_hi);
        return features_from_bins({coeffs[0], coeffs[1], coeffs[2]}, bins);
    };

    ChainOptions chain_options = cfg.chain();
    chain_options.seed = derive_seed(cfg.seed, ix, iy);
    PosteriorChain chain = run_chain(model, measured, fm.cov, cfg.box(), chain_options);
    write_chain(chain, out_chain);

    PosteriorSummary summary = posterior_summary(chain);
    std::cout << "acceptance rate " << fmt(chain.acceptance_rate()) << "\n";
    std::cout << "mean b " << fmt(summary.mean.b) << " c " << fmt(summary.mean.c) << "\n";
    std::cout << "sd b " << fmt(std::sqrt(summary.covariance[0][0])) << " c "
              << fmt(std::sqrt(summary.covariance[1][1])) << "\n";

    if (out_kde.empty()) out_kde = with_suffix(out_chain, "_kde");
    MapCsv kde_map;
    kde_map.quantity = "density";
    kde_map.units = "1/((1/us)*(L/us))";
    kde_map.nx = kde_n;
    kde_map.ny = kde_n;
    kde_map.values.resize(static_cast<size_t>(kde_n) * kde_n);
    PriorBox box = cfg.box();
    for (int row = 0; row < kde_n; ++row) {
        double c = box.c_min + (row + 0.5) * box.c_range() / kde_n;
        for (int col = 0; col < kde_n; ++col) {
            double b = box.b_min + (col + 0.5) * box.b_range() / kde_n;
            kde_map.values[static_cast<size_t>(row) * kde_n + col] =
                summary.kde.density(b, c);
        }
    }
    write_map_csv(kde_map, out_kde);
    std::cout << "wrote chain to " << out_chain << ", kde to " << out_kde << "\n";
    return 0;
}

int cmd_test(RunConfig cfg, const std::string& in_path, const std::string& ref_path,
             const std::string& out_p, std::string out_rejected,
             const std::string& out_unreliable, double b_crit, double c_crit) {
    ScanSet set = read_scan_set(in_path);
    adopt_geometry(cfg, set);
    ScanSet reference = read_scan_set(ref_path);
    if (!(reference.grid() == set.grid()))
        throw InvalidArgument("reference and input scan sets use different time grids");

    FeatureModel fm = reference_model(reference, cfg);
    ExcitationPulse pulse = cfg.pulse();
    PlateModel plate = cfg.plate();

    Thresholds thresholds;
    bool have_b = std::isfinite(b_crit);
    bool have_c = std::isfinite(c_crit);
    if (have_b != have_c)
        throw InvalidArgument("--b-crit and --c-crit must be given together");
    if (have_b) {
        thresholds.b_crit = b_crit;
        thresholds.c_crit = c_crit;
        thresholds.quantile_level = cfg.quantile_level;
        thresholds.provenance = "command line";
    } else {
        CalibrateGridOptions cal;
        cal.box = cfg.box();
        cal.solver = cfg.solver();
        cal.echo_threshold = cfg.echo_threshold;
        cal.excitation_threshold = cfg.excitation_threshold;
        cal.threads = cfg.threads;
        ParameterMap ref_map = calibrate_grid(reference, pulse, plate, cfg.start(), cal);
        thresholds = derive_thresholds(ref_map, {}, cfg.quantile_level,
                                       "reference calibration of " + ref_path);
    }
    std::cout << "thresholds: b_crit " << fmt(thresholds.b_crit) << " c_crit "
              << fmt(thresholds.c_crit) << " (" << thresholds.provenance << ")\n";

    DamageTestOptions options;
    options.window = fm.window;
    options.chain = cfg.chain();
    options.level = cfg.rejection_level;
    options.solver = cfg.solver();
    options.threads = cfg.threads;
    ProbabilityMap map = test_grid(set, thresholds, cfg.box(), fm.cov, pulse, plate,
                                   options);

    write_map_csv(map_from_probabilities(map, "p_null"), out_p);
    if (out_rejected.empty()) out_rejected = with_suffix(out_p, "_rejected");
    write_map_csv(map_from_probabilities(map, "rejected"), out_rejected);
    if (!out_unreliable.empty())
        write_map_csv(map_from_probabilities(map, "unreliable"), out_unreliable);

    int tested = 0, rejected = 0, unreliable = 0;
    for (const auto& cell : map.cells) {
        if (!cell) continue;
        ++tested;
        if (cell->rejected) ++rejected;
        if (cell->unreliable) ++unreliable;
    }
    std::cout << "rejected " << rejected << " of " << tested << " tested locations, "
              << unreliable << " unreliable\n";
    std::cout << "wrote " << out_p << " and " << out_rejected << "\n";
    return 0;
}

int cmd_render(const std::string& in_path, const std::string& out) {
    write_map_pgm(read_map_csv(in_path), out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Pulse-echo A-scan simulation, calibration, and damage testing"};
    app.require_subcommand(1);
    // Shared options remain usable after the subcommand name.
    app.fallthrough();

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path,
                   "key=value config file; entries override flags");
    app.add_option("--dt", cfg.dt, "sample interval, us");
    app.add_option("--samples", cfg.n_samples, "record length in samples");
    app.add_option("--t-ex", cfg.t_ex, "excitation end, us");
    app.add_option("--plate-length", cfg.plate_length, "plate thickness, L");
    app.add_option("--plate-dz", cfg.plate_dz, "solver depth step, L");
    app.add_option("--pulse-freq", cfg.pulse_freq_mhz, "transducer frequency, MHz");
    app.add_option("--pulse-cycles", cfg.pulse_cycles, "tone-burst length, cycles");
    app.add_option("--pulse-amplitude", cfg.pulse_amplitude, "tone-burst amplitude");
    app.add_option("--smooth-cutoff", cfg.smooth_cutoff_mhz,
                   "excitation low-pass cutoff, MHz");
    app.add_option("--smooth-taper", cfg.smooth_taper, "low-pass taper fraction");
    app.add_option("--echo-threshold", cfg.echo_threshold,
                   "fault jump threshold after t_ex");
    app.add_option("--excitation-threshold", cfg.excitation_threshold,
                   "fault jump threshold before t_ex");
    app.add_option("--window-lo", cfg.window_lo, "feature window start, us");
    app.add_option("--window-hi", cfg.window_hi, "feature window end, us");
    app.add_option("--max-feature-freq", cfg.max_feature_freq_mhz,
                   "dominant-bin search limit, MHz");
    app.add_option("--b-min", cfg.b_min, "prior box: damping lower bound, 1/us");
    app.add_option("--b-max", cfg.b_max, "prior box: damping upper bound, 1/us");
    app.add_option("--c-min", cfg.c_min, "prior box: speed lower bound, L/us");
    app.add_option("--c-max", cfg.c_max, "prior box: speed upper bound, L/us");
    app.add_option("--start-b", cfg.start_b, "calibration start: damping");
    app.add_option("--start-c", cfg.start_c, "calibration start: speed");
    app.add_option("--eps-early", cfg.eps_early, "proposal scale before the switch");
    app.add_option("--eps-late", cfg.eps_late, "proposal scale after the switch");
    app.add_option("--switch-step", cfg.switch_step, "proposal schedule switch step");
    app.add_option("--burn-in", cfg.burn_in, "chain burn-in steps");
    app.add_option("--chain-samples", cfg.chain_samples, "chain samples kept");
    app.add_option("--seed", cfg.seed, "root random seed");
    app.add_option("--quantile-level", cfg.quantile_level,
                   "reference quantile for thresholds");
    app.add_option("--rejection-level", cfg.rejection_level, "p_null rejection level");
    app.add_option("--solver-window-rate", cfg.solver_window_rate,
                   "spectral window rate, 1/us (negative = auto)");
    app.add_option("--solver-spectrum-cutoff", cfg.solver_spectrum_cutoff,
                   "relative line truncation threshold");
    app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");

    auto* sim = app.add_subcommand("simulate", "write a synthetic plate scan set");
    SyntheticPlateSpec spec;
    std::string spec_path, label, sim_out;
    sim->add_option("--spec", spec_path, "key=value plate description file");
    sim->add_option("--nx", spec.nx, "grid locations in x");
    sim->add_option("--ny", spec.ny, "grid locations in y");
    sim->add_option("--dx-mm", spec.dx_mm, "grid pitch in x, mm");
    sim->add_option("--dy-mm", spec.dy_mm, "grid pitch in y, mm");
    sim->add_option("--base-b", spec.base.b, "base damping, 1/us");
    sim->add_option("--base-c", spec.base.c, "base speed, L/us");
    sim->add_option("--patch-x0", spec.patch_x0, "patch origin in x");
    sim->add_option("--patch-y0", spec.patch_y0, "patch origin in y");
    sim->add_option("--patch-w", spec.patch_w, "patch width, cells (0 = none)");
    sim->add_option("--patch-h", spec.patch_h, "patch height, cells (0 = none)");
    sim->add_option("--delta-b", spec.delta_b, "patch damping offset");
    sim->add_option("--delta-c", spec.delta_c, "patch speed offset");
    sim->add_option("--noise-sigma", spec.noise_sigma, "sample noise sd, amplitude");
    sim->add_option("--noise-seed", spec.seed, "plate noise seed");
    sim->add_option("--label", label, "scan set label");
    sim->add_option("-o,--out", sim_out, "output scan set")->required();

    auto* pre = app.add_subcommand("preprocess", "normalize, head-subtract, drop faults");
    std::string pre_in, pre_out, head_path;
    bool counts = false, keep_faulty = false;
    pre->add_option("input", pre_in, "input scan set")->required();
    pre->add_option("-o,--out", pre_out, "output scan set")->required();
    pre->add_flag("--counts", counts, "input holds 0..511 transducer counts");
    pre->add_option("--head", head_path, "scan set with head reference traces");
    pre->add_flag("--keep-faulty", keep_faulty, "report faults but keep the scans");

    auto* cal = app.add_subcommand("calibrate", "least-squares parameter maps");
    std::string cal_in, cal_out, cal_b, cal_misfit, cal_status;
    cal->add_option("input", cal_in, "input scan set")->required();
    cal->add_option("-o,--out", cal_out, "wave-speed map CSV")->required();
    cal->add_option("--out-b", cal_b, "damping map CSV");
    cal->add_option("--out-misfit", cal_misfit, "residual-norm map CSV");
    cal->add_option("--out-status", cal_status, "cell status map CSV");

    auto* post = app.add_subcommand("posterior", "posterior chain for one location");
    std::string post_in, post_ref, post_loc, post_out, post_kde;
    int kde_n = 64;
    post->add_option("input", post_in, "input scan set")->required();
    post->add_option("--reference", post_ref, "healthy scan set for bins/covariance")
        ->required();
    post->add_option("--location", post_loc, "grid location 'ix,iy'")->required();
    post->add_option("-o,--out", post_out, "chain CSV")->required();
    post->add_option("--kde-out", post_kde, "density grid CSV (default: <out>_kde)");
    post->add_option("--kde-n", kde_n, "density grid resolution per axis");

    auto* test = app.add_subcommand("test", "per-location damage probability maps");
    std::string test_in, test_ref, test_out, test_rej, test_unrel;
    double b_crit = std::numeric_limits<double>::quiet_NaN();
    double c_crit = std::numeric_limits<double>::quiet_NaN();
    test->add_option("input", test_in, "input scan set")->required();
    test->add_option("--reference", test_ref, "healthy scan set for thresholds")
        ->required();
    test->add_option("-o,--out", test_out, "p_null map CSV")->required();
    test->add_option("--out-rejected", test_rej,
                     "rejection map CSV (default: <out>_rejected)");
    test->add_option("--out-unreliable", test_unrel, "unreliable-chain map CSV");
    test->add_option("--b-crit", b_crit, "damping threshold override");
    test->add_option("--c-crit", c_crit, "speed threshold override");

    auto* render = app.add_subcommand("render", "map CSV to grayscale image");
    std::string render_in, render_out;
    render->add_option("input", render_in, "map CSV")->required();
    render->add_option("-o,--out", render_out, "output PGM")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (sim->parsed()) {
            if (!spec_path.empty()) apply_plate_file(spec, label, spec_path);
            return cmd_simulate(cfg, spec, label, sim_out);
        }
        if (pre->parsed())
            return cmd_preprocess(cfg, pre_in, pre_out, counts, head_path, keep_faulty);
        if (cal->parsed())
            return cmd_calibrate(cfg, cal_in, cal_out, cal_b, cal_misfit, cal_status);
        if (post->parsed())
            return cmd_posterior(cfg, post_in, post_ref, post_loc, post_out, post_kde,
                                 kde_n);
        if (test->parsed())
            return cmd_test(cfg, test_in, test_ref, test_out, test_rej, test_unrel,
                            b_crit, c_crit);
        if (render->parsed()) return cmd_render(render_in, render_out);
        std::cerr << "error: no subcommand given\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CorruptInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ascan
