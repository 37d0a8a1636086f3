#include "ascan/signal_core.hpp"

#include <algorithm>
#include <cmath>

namespace ascan {

int TimeGrid::index_at_or_before(double t) const {
    if (t < t0) return -1;
    double pos = std::floor((t - t0) / dt + 1e-9);
    if (pos >= n_samples - 1) return n_samples - 1;
    return static_cast<int>(pos);
}

TimeGrid make_time_grid(double dt, int n_samples, double t0) {
    if (!(dt > 0.0)) throw InvalidArgument("time grid: dt must be positive");
    if (n_samples < 2) throw InvalidArgument("time grid: need at least 2 samples");
    if (!std::isfinite(t0)) throw InvalidArgument("time grid: t0 must be finite");
    return TimeGrid{dt, n_samples, t0};
}

AScan make_ascan(TimeGrid grid, std::vector<double> samples, double x_mm, double y_mm) {
    if (static_cast<int>(samples.size()) != grid.n_samples)
        throw InvalidArgument("a-scan: sample count does not match grid");
    return AScan{grid, std::move(samples), x_mm, y_mm};
}

ExcitationPulse make_excitation_pulse(TimeGrid grid, std::vector<double> samples,
                                      double t_ex) {
    if (static_cast<int>(samples.size()) != grid.n_samples)
        throw InvalidArgument("excitation pulse: sample count does not match grid");
    if (!(t_ex > grid.t0) || !(t_ex <= grid.t0 + grid.duration()))
        throw InvalidArgument("excitation pulse: t_ex outside the time grid");
    if (!samples.empty() && samples.front() != 0.0)
        throw InvalidArgument("excitation pulse: sample at t = 0 must be zero");
    for (int i = 0; i < grid.n_samples; ++i) {
        if (grid.time(i) >= t_ex && samples[i] != 0.0)
            throw InvalidArgument("excitation pulse: samples must vanish from t_ex onward");
    }
    return ExcitationPulse{grid, std::move(samples), t_ex};
}

MaterialParams make_material_params(double b, double c) {
    if (!(b >= 0.0) || !std::isfinite(b))
        throw InvalidArgument("material: damping b must be finite and >= 0");
    if (!(c > 0.0) || !std::isfinite(c))
        throw InvalidArgument("material: wave speed c must be finite and > 0");
    return MaterialParams{b, c};
}

std::pair<int, int> window_sample_range(const TimeGrid& grid, double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw InvalidArgument("window: need t_lo < t_hi");
    int first = std::max(0, grid.index_at_or_before(t_lo));
    if (grid.time(first) < t_lo - 1e-9) ++first;
    int last = grid.index_at_or_before(t_hi);
    return {first, last};
}

PriorBox make_prior_box(double b_min, double b_max, double c_min, double c_max) {
    if (!std::isfinite(b_min) || !std::isfinite(b_max) || !(b_min < b_max))
        throw InvalidArgument("prior box: need finite b_min < b_max");
    if (!(b_min >= 0.0))
        throw InvalidArgument("prior box: damping bounds must be >= 0");
    if (!std::isfinite(c_min) || !std::isfinite(c_max) || !(c_min < c_max))
        throw InvalidArgument("prior box: need finite c_min < c_max");
    if (!(c_min > 0.0))
        throw InvalidArgument("prior box: wave speed bounds must be > 0");
    return PriorBox{b_min, b_max, c_min, c_max};
}

int PlateModel::n_intervals() const {
    return static_cast<int>(std::lround(length / dz));
}

PlateModel make_plate_model(double length, double dz) {
    if (!(length > 0.0)) throw InvalidArgument("plate: length must be positive");
    if (!(dz > 0.0) || dz > 0.01)
        throw InvalidArgument("plate: dz must be in (0, 0.01]");
    double ratio = length / dz;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9 * ratio)
        throw InvalidArgument("plate: length must be an integer multiple of dz");
    return PlateModel{length, dz};
}

ScanSet::ScanSet(int nx, int ny, double dx_mm, double dy_mm,
                 double x0_mm, double y0_mm, std::string label)
    : nx_(nx), ny_(ny), dx_mm_(dx_mm), dy_mm_(dy_mm),
      x0_mm_(x0_mm), y0_mm_(y0_mm), label_(std::move(label)),
      scans_(static_cast<size_t>(nx) * static_cast<size_t>(ny)) {
    if (nx <= 0 || ny <= 0) throw InvalidArgument("scan set: grid dims must be positive");
    if (!(dx_mm > 0.0) || !(dy_mm > 0.0))
        throw InvalidArgument("scan set: resolution must be positive");
}

int ScanSet::index(int ix, int iy) const {
    if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_)
        throw InvalidArgument("scan set: index (" + std::to_string(ix) + "," +
                              std::to_string(iy) + ") outside grid");
    return iy * nx_ + ix;
}

bool ScanSet::has(int ix, int iy) const { return scans_[index(ix, iy)].has_value(); }

const AScan& ScanSet::at(int ix, int iy) const {
    const auto& slot = scans_[index(ix, iy)];
    if (!slot)
        throw InvalidArgument("scan set: no scan at (" + std::to_string(ix) + "," +
                              std::to_string(iy) + ")");
    return *slot;
}

void ScanSet::set(int ix, int iy, AScan scan) {
    for (const auto& s : scans_) {
        if (s && !(s->grid == scan.grid))
            throw InvalidArgument("scan set: scans must share one time grid");
    }
    scans_[index(ix, iy)] = std::move(scan);
}

void ScanSet::unset(int ix, int iy) { scans_[index(ix, iy)].reset(); }

int ScanSet::count_present() const {
    int n = 0;
    for (const auto& s : scans_)
        if (s) ++n;
    return n;
}

const TimeGrid& ScanSet::grid() const {
    for (const auto& s : scans_)
        if (s) return s->grid;
    throw InsufficientData("scan set: empty, no shared grid");
}

}  // namespace ascan
