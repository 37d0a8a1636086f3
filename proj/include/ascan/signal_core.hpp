#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ascan/errors.hpp"

namespace ascan {

// Uniform oscilloscope time grid. Times are in microseconds throughout the
// library; sample i sits at t0 + i*dt.
struct TimeGrid {
    double dt = 0.0;       // us
    int n_samples = 0;
    double t0 = 0.0;       // us

    double duration() const { return n_samples * dt; }
    double time(int i) const { return t0 + i * dt; }

    // Index of the last sample with time(i) <= t, or -1 if t < t0.
    int index_at_or_before(double t) const;

    bool operator==(const TimeGrid&) const = default;
};

TimeGrid make_time_grid(double dt, int n_samples, double t0 = 0.0);

// One pulse-echo trace at a grid point. Samples are in normalized amplitude
// units (counts mapped to [-1, 1)); location is in millimeters on the plate
// surface.
struct AScan {
    TimeGrid grid;
    std::vector<double> samples;
    double x_mm = 0.0;
    double y_mm = 0.0;
};

AScan make_ascan(TimeGrid grid, std::vector<double> samples,
                 double x_mm = 0.0, double y_mm = 0.0);

// Excitation trace driving the surface during [0, t_ex]. Sample values must
// vanish at t = 0 and from t_ex onward; the solver relies on both.
struct ExcitationPulse {
    TimeGrid grid;
    std::vector<double> samples;
    double t_ex = 0.0;     // us
};

ExcitationPulse make_excitation_pulse(TimeGrid grid, std::vector<double> samples,
                                      double t_ex);

// Homogeneous material description: damping b (1/us) and wave speed c
// (plate thicknesses per microsecond).
struct MaterialParams {
    double b = 0.0;
    double c = 0.0;
};

MaterialParams make_material_params(double b, double c);

// First and last sample indices falling inside [t_lo, t_hi]. Edges that land
// on a grid point (up to 1 ns slack) are included. The range is empty when
// first > last.
std::pair<int, int> window_sample_range(const TimeGrid& grid, double t_lo, double t_hi);

// Admissible parameter rectangle. Calibration confines its search to it and
// the Bayesian stage uses it as a uniform prior.
struct PriorBox {
    double b_min = 0.05;
    double b_max = 0.6;
    double c_min = 0.2;
    double c_max = 0.25;

    bool contains(const MaterialParams& p) const {
        return p.b >= b_min && p.b <= b_max && p.c >= c_min && p.c <= c_max;
    }
    MaterialParams midpoint() const {
        return {0.5 * (b_min + b_max), 0.5 * (c_min + c_max)};
    }
    double b_range() const { return b_max - b_min; }
    double c_range() const { return c_max - c_min; }
};

PriorBox make_prior_box(double b_min, double b_max, double c_min, double c_max);

// Through-thickness geometry. Thickness is normalized; dz sets the spatial
// sampling used for the echo-phase mode expansion.
struct PlateModel {
    double length = 1.0;
    double dz = 0.001;

    // Number of spatial intervals (length/dz, validated integral).
    int n_intervals() const;
};

PlateModel make_plate_model(double length = 1.0, double dz = 0.001);

// Rectangular grid of scans over the plate surface. Missing points are
// allowed and stay unset; present scans must share one time grid.
class ScanSet {
public:
    ScanSet() = default;
    ScanSet(int nx, int ny, double dx_mm, double dy_mm,
            double x0_mm = 0.0, double y0_mm = 0.0, std::string label = {});

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double dx_mm() const { return dx_mm_; }
    double dy_mm() const { return dy_mm_; }
    double x0_mm() const { return x0_mm_; }
    double y0_mm() const { return y0_mm_; }

    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    // Excitation cutoff carried alongside the scans so a file round-trips
    // everything a pipeline needs. Zero means "not recorded".
    double t_ex() const { return t_ex_; }
    void set_t_ex(double t_ex) { t_ex_ = t_ex; }

    double x_of(int ix) const { return x0_mm_ + ix * dx_mm_; }
    double y_of(int iy) const { return y0_mm_ + iy * dy_mm_; }

    bool has(int ix, int iy) const;
    const AScan& at(int ix, int iy) const;
    void set(int ix, int iy, AScan scan);
    void unset(int ix, int iy);

    int count_present() const;

    // Grid shared by all present scans. Throws InsufficientData when empty.
    const TimeGrid& grid() const;

private:
    int index(int ix, int iy) const;

    int nx_ = 0, ny_ = 0;
    double dx_mm_ = 0.0, dy_mm_ = 0.0;
    double x0_mm_ = 0.0, y0_mm_ = 0.0;
    double t_ex_ = 0.0;
    std::string label_;
    std::vector<std::optional<AScan>> scans_;
};

}  // namespace ascan
