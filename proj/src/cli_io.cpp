#include "ascan/cli_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ascan/preprocess.hpp"
#include "ascan/rng.hpp"
#include "ascan/synth_oracle.hpp"

namespace ascan {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    const char* c = s.c_str();
    char* end = nullptr;
    double v = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw CorruptInput(context + ": expected a number, got '" + s + "'");
    return v;
}

long long parse_ll(const std::string& s, const std::string& context) {
    const char* c = s.c_str();
    char* end = nullptr;
    long long v = std::strtoll(c, &end, 10);
    if (end == c || *end != '\0')
        throw CorruptInput(context + ": expected an integer, got '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& context) {
    const char* c = s.c_str();
    char* end = nullptr;
    unsigned long long v = std::strtoull(c, &end, 10);
    if (end == c || *end != '\0' || s.front() == '-')
        throw CorruptInput(context + ": expected an unsigned integer, got '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Line-oriented reader that keeps the file position and line number for
// error messages.
struct LineReader {
    std::istream& in;
    std::string path;
    int line_no = 0;

    bool next(std::string& out) {
        if (!std::getline(in, out)) return false;
        ++line_no;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw CorruptInput(path + ":" + std::to_string(line_no) + ": " + msg);
    }

    std::string require(const std::string& msg) {
        std::string line;
        if (!next(line)) fail("unexpected end of file, expected " + msg);
        return line;
    }

    // "key value" lines with a fixed expected key.
    std::string expect_field(const std::string& key) {
        std::string line = require("'" + key + "'");
        if (line == key) return "";
        if (line.rfind(key + " ", 0) != 0) fail("expected '" + key + "', got '" + line + "'");
        return line.substr(key.size() + 1);
    }
};

std::uint64_t to_le(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(x);
    return x;
}

void write_le_doubles(std::ostream& out, const std::vector<double>& values) {
    std::vector<std::uint64_t> raw(values.size());
    std::memcpy(raw.data(), values.data(), values.size() * sizeof(double));
    for (auto& w : raw) w = to_le(w);
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
}

std::vector<double> read_le_doubles(std::istream& in, size_t count, const std::string& path) {
    std::vector<std::uint64_t> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(count * sizeof(std::uint64_t)));
    if (static_cast<size_t>(in.gcount()) != count * sizeof(std::uint64_t))
        throw CorruptInput(path + ": sample payload ends early");
    std::vector<double> values(count);
    for (auto& w : raw) w = to_le(w);
    std::memcpy(values.data(), raw.data(), count * sizeof(double));
    return values;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

TimeGrid RunConfig::grid() const { return make_time_grid(dt, n_samples); }
PlateModel RunConfig::plate() const { return make_plate_model(plate_length, plate_dz); }
EchoWindow RunConfig::window() const { return make_echo_window(window_lo, window_hi); }
PriorBox RunConfig::box() const { return make_prior_box(b_min, b_max, c_min, c_max); }
MaterialParams RunConfig::start() const { return make_material_params(start_b, start_c); }

ProposalSchedule RunConfig::schedule() const {
    return make_proposal_schedule(eps_early, eps_late, switch_step);
}

SolverOptions RunConfig::solver() const {
    SolverOptions opt;
    opt.window_rate = solver_window_rate;
    opt.spectrum_rel_cutoff = solver_spectrum_cutoff;
    return opt;
}

ChainOptions RunConfig::chain() const {
    ChainOptions opt;
    opt.schedule = schedule();
    opt.burn_in = burn_in;
    opt.n_samples = chain_samples;
    opt.seed = seed;
    return opt;
}

ExcitationPulse RunConfig::pulse() const {
    ExcitationPulse raw = make_pulse(pulse_freq_mhz, pulse_cycles, pulse_amplitude,
                                     grid(), t_ex);
    return smooth_excitation(raw, smooth_cutoff_mhz, smooth_taper);
}

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    auto d = [&] { return parse_double(value, "config key '" + key + "'"); };
    auto i = [&] { return static_cast<int>(parse_ll(value, "config key '" + key + "'")); };

    if (key == "dt") c.dt = d();
    else if (key == "n_samples") c.n_samples = i();
    else if (key == "t_ex") c.t_ex = d();
    else if (key == "plate_length") c.plate_length = d();
    else if (key == "plate_dz") c.plate_dz = d();
    else if (key == "pulse_freq_mhz") c.pulse_freq_mhz = d();
    else if (key == "pulse_cycles") c.pulse_cycles = d();
    else if (key == "pulse_amplitude") c.pulse_amplitude = d();
    else if (key == "smooth_cutoff_mhz") c.smooth_cutoff_mhz = d();
    else if (key == "smooth_taper") c.smooth_taper = d();
    else if (key == "echo_threshold") c.echo_threshold = d();
    else if (key == "excitation_threshold") c.excitation_threshold = d();
    else if (key == "window_lo") c.window_lo = d();
    else if (key == "window_hi") c.window_hi = d();
    else if (key == "max_feature_freq_mhz") c.max_feature_freq_mhz = d();
    else if (key == "b_min") c.b_min = d();
    else if (key == "b_max") c.b_max = d();
    else if (key == "c_min") c.c_min = d();
    else if (key == "c_max") c.c_max = d();
    else if (key == "start_b") c.start_b = d();
    else if (key == "start_c") c.start_c = d();
    else if (key == "eps_early") c.eps_early = d();
    else if (key == "eps_late") c.eps_late = d();
    else if (key == "switch_step") c.switch_step = i();
    else if (key == "burn_in") c.burn_in = i();
    else if (key == "chain_samples") c.chain_samples = i();
    else if (key == "seed") c.seed = parse_u64(value, "config key 'seed'");
    else if (key == "quantile_level") c.quantile_level = d();
    else if (key == "rejection_level") c.rejection_level = d();
    else if (key == "solver_window_rate") c.solver_window_rate = d();
    else if (key == "solver_spectrum_cutoff") c.solver_spectrum_cutoff = d();
    else if (key == "threads") c.threads = i();
    else throw CorruptInput("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in = open_in(path);
    LineReader reader{in, path};
    std::string line;
    while (reader.next(line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos) reader.fail("expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) reader.fail("empty config key");
        try {
            apply_config_entry(config, key, value);
        } catch (const CorruptInput& e) {
            reader.fail(e.what());
        }
    }
}

void write_config(const RunConfig& c, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "dt = " << fmt(c.dt) << "\n";
    out << "n_samples = " << c.n_samples << "\n";
    out << "t_ex = " << fmt(c.t_ex) << "\n";
    out << "plate_length = " << fmt(c.plate_length) << "\n";
    out << "plate_dz = " << fmt(c.plate_dz) << "\n";
    out << "pulse_freq_mhz = " << fmt(c.pulse_freq_mhz) << "\n";
    out << "pulse_cycles = " << fmt(c.pulse_cycles) << "\n";
    out << "pulse_amplitude = " << fmt(c.pulse_amplitude) << "\n";
    out << "smooth_cutoff_mhz = " << fmt(c.smooth_cutoff_mhz) << "\n";
    out << "smooth_taper = " << fmt(c.smooth_taper) << "\n";
    out << "echo_threshold = " << fmt(c.echo_threshold) << "\n";
    out << "excitation_threshold = " << fmt(c.excitation_threshold) << "\n";
    out << "window_lo = " << fmt(c.window_lo) << "\n";
    out << "window_hi = " << fmt(c.window_hi) << "\n";
    out << "max_feature_freq_mhz = " << fmt(c.max_feature_freq_mhz) << "\n";
    out << "b_min = " << fmt(c.b_min) << "\n";
    out << "b_max = " << fmt(c.b_max) << "\n";
    out << "c_min = " << fmt(c.c_min) << "\n";
    out << "c_max = " << fmt(c.c_max) << "\n";
    out << "start_b = " << fmt(c.start_b) << "\n";
    out << "start_c = " << fmt(c.start_c) << "\n";
    out << "eps_early = " << fmt(c.eps_early) << "\n";
    out << "eps_late = " << fmt(c.eps_late) << "\n";
    out << "switch_step = " << c.switch_step << "\n";
    out << "burn_in = " << c.burn_in << "\n";
    out << "chain_samples = " << c.chain_samples << "\n";
    out << "seed = " << c.seed << "\n";
    out << "quantile_level = " << fmt(c.quantile_level) << "\n";
    out << "rejection_level = " << fmt(c.rejection_level) << "\n";
    out << "solver_window_rate = " << fmt(c.solver_window_rate) << "\n";
    out << "solver_spectrum_cutoff = " << fmt(c.solver_spectrum_cutoff) << "\n";
    out << "threads = " << c.threads << "\n";
    finish(out, path);
}

RunConfig read_config(const std::string& path) {
    RunConfig config;
    apply_config_file(config, path);
    return config;
}

void write_scan_set(const ScanSet& set, const std::string& path) {
    if (set.count_present() == 0)
        throw InvalidArgument("scan set write: the set has no scans");
    const TimeGrid& grid = set.grid();

    std::ofstream out = open_out(path, true);
    out << "ASCANSET 1\n";
    out << "dt " << fmt(grid.dt) << "\n";
    out << "n_samples " << grid.n_samples << "\n";
    out << "t0 " << fmt(grid.t0) << "\n";
    out << "t_ex " << fmt(set.t_ex()) << "\n";
    out << "nx " << set.nx() << "\n";
    out << "ny " << set.ny() << "\n";
    out << "dx_mm " << fmt(set.dx_mm()) << "\n";
    out << "dy_mm " << fmt(set.dy_mm()) << "\n";
    out << "x0_mm " << fmt(set.x0_mm()) << "\n";
    out << "y0_mm " << fmt(set.y0_mm()) << "\n";
    out << "label " << set.label() << "\n";

    std::string missing;
    for (int iy = 0; iy < set.ny(); ++iy) {
        for (int ix = 0; ix < set.nx(); ++ix) {
            if (!set.has(ix, iy)) {
                if (!missing.empty()) missing += ' ';
                missing += std::to_string(ix) + "," + std::to_string(iy);
            }
        }
    }
    if (!missing.empty()) out << "missing " << missing << "\n";
    out << "DATA\n";

    for (int iy = 0; iy < set.ny(); ++iy) {
        for (int ix = 0; ix < set.nx(); ++ix) {
            if (set.has(ix, iy)) write_le_doubles(out, set.at(ix, iy).samples);
        }
    }
    finish(out, path);
}

ScanSet read_scan_set(const std::string& path) {
    std::ifstream in = open_in(path, true);
    LineReader reader{in, path};

    if (reader.require("'ASCANSET 1'") != "ASCANSET 1")
        reader.fail("not a scan-set file (bad magic)");
    double dt = parse_double(reader.expect_field("dt"), path + ": dt");
    int n_samples = static_cast<int>(parse_ll(reader.expect_field("n_samples"),
                                              path + ": n_samples"));
    double t0 = parse_double(reader.expect_field("t0"), path + ": t0");
    double t_ex = parse_double(reader.expect_field("t_ex"), path + ": t_ex");
    int nx = static_cast<int>(parse_ll(reader.expect_field("nx"), path + ": nx"));
    int ny = static_cast<int>(parse_ll(reader.expect_field("ny"), path + ": ny"));
    double dx = parse_double(reader.expect_field("dx_mm"), path + ": dx_mm");
    double dy = parse_double(reader.expect_field("dy_mm"), path + ": dy_mm");
    double x0 = parse_double(reader.expect_field("x0_mm"), path + ": x0_mm");
    double y0 = parse_double(reader.expect_field("y0_mm"), path + ": y0_mm");
    std::string label = reader.expect_field("label");

    if (nx < 1 || ny < 1) reader.fail("grid dimensions must be positive");
    TimeGrid grid;
    try {
        grid = make_time_grid(dt, n_samples, t0);
    } catch (const InvalidArgument& e) {
        reader.fail(e.what());
    }

    std::vector<char> present(static_cast<size_t>(nx) * ny, 1);
    std::string line = reader.require("'missing' or 'DATA'");
    if (line.rfind("missing ", 0) == 0) {
        std::istringstream miss(line.substr(8));
        std::string pair;
        while (miss >> pair) {
            size_t comma = pair.find(',');
            if (comma == std::string::npos) reader.fail("bad missing entry '" + pair + "'");
            int ix = static_cast<int>(parse_ll(pair.substr(0, comma), path + ": missing"));
            int iy = static_cast<int>(parse_ll(pair.substr(comma + 1), path + ": missing"));
            if (ix < 0 || ix >= nx || iy < 0 || iy >= ny)
                reader.fail("missing entry outside the grid");
            present[static_cast<size_t>(iy) * nx + ix] = 0;
        }
        line = reader.require("'DATA'");
    }
    if (line != "DATA") reader.fail("expected 'DATA', got '" + line + "'");

    ScanSet set(nx, ny, dx, dy, x0, y0, label);
    set.set_t_ex(t_ex);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            if (!present[static_cast<size_t>(iy) * nx + ix]) continue;
            std::vector<double> samples = read_le_doubles(in, n_samples, path);
            for (int k = 0; k < n_samples; ++k) {
                if (!std::isfinite(samples[k]))
                    throw CorruptInput(path + ": non-finite sample " + std::to_string(k) +
                                       " at location " + std::to_string(ix) + "," +
                                       std::to_string(iy));
            }
            set.set(ix, iy, make_ascan(grid, std::move(samples), set.x_of(ix), set.y_of(iy)));
        }
    }
    char extra;
    if (in.read(&extra, 1); in.gcount() != 0)
        throw CorruptInput(path + ": trailing bytes after the sample payload");
    return set;
}

void write_chain(const PosteriorChain& chain, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# ascan chain 1\n";
    out << "# seed " << chain.seed << "\n";
    out << "# burn_in " << chain.burn_in << "\n";
    out << "# accepted " << chain.accepted << "\n";
    out << "# box " << fmt(chain.box.b_min) << " " << fmt(chain.box.b_max) << " "
        << fmt(chain.box.c_min) << " " << fmt(chain.box.c_max) << "\n";
    out << "# schedule " << fmt(chain.schedule.eps_early) << " "
        << fmt(chain.schedule.eps_late) << " " << chain.schedule.switch_step << "\n";
    out << "b,c\n";
    for (const auto& s : chain.samples) out << fmt(s.b) << "," << fmt(s.c) << "\n";
    finish(out, path);
}

PosteriorChain read_chain(const std::string& path) {
    std::ifstream in = open_in(path);
    LineReader reader{in, path};

    if (reader.require("'# ascan chain 1'") != "# ascan chain 1")
        reader.fail("not a chain file (bad magic)");
    PosteriorChain chain;
    chain.seed = parse_u64(reader.expect_field("# seed"), path + ": seed");
    chain.burn_in = static_cast<int>(parse_ll(reader.expect_field("# burn_in"),
                                              path + ": burn_in"));
    chain.accepted = static_cast<int>(parse_ll(reader.expect_field("# accepted"),
                                               path + ": accepted"));
    {
        std::istringstream box(reader.expect_field("# box"));
        std::string a, b, c, d;
        if (!(box >> a >> b >> c >> d)) reader.fail("bad box line");
        chain.box.b_min = parse_double(a, path + ": box");
        chain.box.b_max = parse_double(b, path + ": box");
        chain.box.c_min = parse_double(c, path + ": box");
        chain.box.c_max = parse_double(d, path + ": box");
    }
    {
        std::istringstream sched(reader.expect_field("# schedule"));
        std::string a, b, c;
        if (!(sched >> a >> b >> c)) reader.fail("bad schedule line");
        chain.schedule.eps_early = parse_double(a, path + ": schedule");
        chain.schedule.eps_late = parse_double(b, path + ": schedule");
        chain.schedule.switch_step = static_cast<int>(parse_ll(c, path + ": schedule"));
    }
    if (reader.require("'b,c'") != "b,c") reader.fail("expected the 'b,c' column header");

    std::string line;
    while (reader.next(line)) {
        if (line.empty()) reader.fail("blank line inside the sample block");
        size_t comma = line.find(',');
        if (comma == std::string::npos) reader.fail("expected 'b,c' sample row");
        MaterialParams p;
        p.b = parse_double(line.substr(0, comma), path + ": sample b");
        p.c = parse_double(line.substr(comma + 1), path + ": sample c");
        chain.samples.push_back(p);
    }
    return chain;
}

int MapCsv::index(int ix, int iy) const {
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny)
        throw InvalidArgument("map: location outside the grid");
    return iy * nx + ix;
}

MapCsv map_from_parameters(const ParameterMap& map, const std::string& quantity) {
    MapCsv out;
    out.quantity = quantity;
    out.nx = map.nx;
    out.ny = map.ny;
    out.values.resize(map.cells.size());
    for (size_t i = 0; i < map.cells.size(); ++i) {
        const auto& cell = map.cells[i];
        if (quantity == "status") {
            out.units = "code";
            out.values[i] = static_cast<double>(map.status[i]);
        } else if (cell) {
            if (quantity == "b") {
                out.units = "1/us";
                out.values[i] = cell->params.b;
            } else if (quantity == "c") {
                out.units = "L/us";
                out.values[i] = cell->params.c;
            } else if (quantity == "misfit") {
                out.units = "amp*sqrt(us)";
                out.values[i] = cell->misfit;
            } else if (quantity == "iterations") {
                out.units = "count";
                out.values[i] = cell->iterations;
            } else if (quantity == "converged") {
                out.units = "flag";
                out.values[i] = cell->converged ? 1.0 : 0.0;
            } else {
                throw InvalidArgument("parameter map has no quantity '" + quantity + "'");
            }
        }
    }
    // Set units even when every cell is empty.
    if (quantity == "b") out.units = "1/us";
    else if (quantity == "c") out.units = "L/us";
    else if (quantity == "misfit") out.units = "amp*sqrt(us)";
    else if (quantity == "iterations") out.units = "count";
    else if (quantity == "converged") out.units = "flag";
    else if (quantity == "status") out.units = "code";
    else throw InvalidArgument("parameter map has no quantity '" + quantity + "'");
    return out;
}

MapCsv map_from_probabilities(const ProbabilityMap& map, const std::string& quantity) {
    MapCsv out;
    out.quantity = quantity;
    out.nx = map.nx;
    out.ny = map.ny;
    out.values.resize(map.cells.size());
    if (quantity == "p_null" || quantity == "standard_error") out.units = "probability";
    else if (quantity == "rejected" || quantity == "unreliable") out.units = "flag";
    else throw InvalidArgument("probability map has no quantity '" + quantity + "'");
    for (size_t i = 0; i < map.cells.size(); ++i) {
        const auto& cell = map.cells[i];
        if (!cell) continue;
        if (quantity == "p_null") out.values[i] = cell->p_null;
        else if (quantity == "standard_error") out.values[i] = cell->standard_error;
        else if (quantity == "rejected") out.values[i] = cell->rejected ? 1.0 : 0.0;
        else out.values[i] = cell->unreliable ? 1.0 : 0.0;
    }
    return out;
}

void write_map_csv(const MapCsv& map, const std::string& path) {
    if (map.nx < 1 || map.ny < 1) throw InvalidArgument("map write: the map is empty");
    if (map.quantity.empty() || map.quantity.find(' ') != std::string::npos)
        throw InvalidArgument("map write: quantity must be a single token");
    if (map.units.empty() || map.units.find(' ') != std::string::npos)
        throw InvalidArgument("map write: units must be a single token");
    if (map.values.size() != static_cast<size_t>(map.nx) * map.ny)
        throw InvalidArgument("map write: value count does not match the shape");

    std::ofstream out = open_out(path);
    out << "# map " << map.quantity << " " << map.units << " " << map.nx << " " << map.ny
        << "\n";
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            if (ix) out << ",";
            const auto& v = map.values[static_cast<size_t>(iy) * map.nx + ix];
            if (v) out << fmt(*v);
        }
        out << "\n";
    }
    finish(out, path);
}

MapCsv read_map_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    LineReader reader{in, path};

    std::istringstream header(reader.expect_field("# map"));
    MapCsv map;
    std::string sx, sy;
    if (!(header >> map.quantity >> map.units >> sx >> sy))
        reader.fail("bad map header, expected '# map <quantity> <units> <nx> <ny>'");
    map.nx = static_cast<int>(parse_ll(sx, path + ": nx"));
    map.ny = static_cast<int>(parse_ll(sy, path + ": ny"));
    if (map.nx < 1 || map.ny < 1) reader.fail("map dimensions must be positive");
    map.values.resize(static_cast<size_t>(map.nx) * map.ny);

    for (int iy = 0; iy < map.ny; ++iy) {
        std::string line = reader.require("a data row");
        size_t start = 0;
        for (int ix = 0; ix < map.nx; ++ix) {
            size_t comma = line.find(',', start);
            bool last = ix == map.nx - 1;
            if (last != (comma == std::string::npos))
                reader.fail("expected " + std::to_string(map.nx) + " columns");
            std::string field =
                last ? line.substr(start) : line.substr(start, comma - start);
            if (!field.empty())
                map.values[static_cast<size_t>(iy) * map.nx + ix] =
                    parse_double(field, path + ": cell");
            start = last ? line.size() : comma + 1;
        }
    }
    std::string extra;
    if (reader.next(extra)) reader.fail("trailing content after the last row");
    return map;
}

void write_map_pgm(const MapCsv& map, const std::string& path) {
    if (map.values.size() != static_cast<size_t>(map.nx) * map.ny || map.nx < 1 ||
        map.ny < 1)
        throw InvalidArgument("map render: the map is empty or inconsistent");

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& v : map.values) {
        if (!v) continue;
        if (!any || *v < lo) lo = *v;
        if (!any || *v > hi) hi = *v;
        any = true;
    }
    if (!any) throw InvalidArgument("map render: no values to render");

    std::ofstream out = open_out(path, true);
    out << "P5\n";
    out << "# map " << map.quantity << " " << map.units << "\n";
    out << "# min " << fmt(lo) << " max " << fmt(hi) << "\n";
    out << "# missing rendered black\n";
    out << map.nx << " " << map.ny << "\n255\n";
    const double range = hi - lo;
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            const auto& v = map.values[static_cast<size_t>(iy) * map.nx + ix];
            unsigned char pix = 0;
            if (v) {
                pix = range > 0.0
                          ? static_cast<unsigned char>(std::lround((*v - lo) / range * 255.0))
                          : static_cast<unsigned char>(128);
            }
            out.put(static_cast<char>(pix));
        }
    }
    finish(out, path);
}

}  // namespace ascan
