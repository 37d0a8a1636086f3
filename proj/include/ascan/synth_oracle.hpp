#pragma once

#include <cstdint>
#include <vector>

#include "ascan/signal_core.hpp"

namespace ascan {

// Hann-windowed sinusoid: n_cycles periods of center_freq_mhz under a raised
// cosine, centered inside (0, t_ex). Zero value and slope at both ends of the
// support, exactly zero outside it.
ExcitationPulse make_pulse(double center_freq_mhz, double n_cycles, double amplitude,
                           const TimeGrid& grid, double t_ex);

struct FdtdOptions {
    int refinement = 4;     // grid refinement vs (dt, dz); both are divided
    int energy_stride = 0;  // record discrete energy every this many coarse
                            // steps (0 = off)
};

struct FdtdSolution {
    AScan surface;                     // trace at z = 0 on the coarse grid
    std::vector<double> energy_times;  // us, only when energy_stride > 0
    std::vector<double> energy;        // discrete energy at those times
};

// Second-order finite-difference march for the damped wave equation
//   u_tt + b u_t = c^2 u_zz
// with u(0,t) = f(t) while t <= t_ex (free end afterwards) and a free end at
// z = L throughout. This is the reference path: it shares no code with the
// spectral solver and is deliberately plain. Refusal to run outside the CFL
// bound c*dt <= dz is an error, not a clamp.
FdtdSolution fdtd_solve(const MaterialParams& params, const ExcitationPulse& pulse,
                        const PlateModel& plate, const TimeGrid& grid,
                        const FdtdOptions& options = {});

// Synthetic damage plate: a base-material grid with one rectangular patch of
// different parameters, plus i.i.d. Gaussian sample noise. Cell (ix, iy) gets
// its own noise stream derived from `seed`, so a plate is reproducible
// bit-for-bit regardless of evaluation order.
struct SyntheticPlateSpec {
    int nx = 21;
    int ny = 19;
    double dx_mm = 5.0;
    double dy_mm = 5.0;

    MaterialParams base{0.12, 0.224};

    // Patch bounds in cell indices, inclusive; width/height 0 disables it.
    int patch_x0 = 0;
    int patch_y0 = 0;
    int patch_w = 0;
    int patch_h = 0;
    double delta_b = 0.0;
    double delta_c = 0.0;

    double noise_sigma = 0.0;   // amplitude units, on every sample
    uint64_t seed = 1;

    bool in_patch(int ix, int iy) const {
        return patch_w > 0 && patch_h > 0 &&
               ix >= patch_x0 && ix < patch_x0 + patch_w &&
               iy >= patch_y0 && iy < patch_y0 + patch_h;
    }
};

ScanSet make_synthetic_plate(const SyntheticPlateSpec& spec, const ExcitationPulse& pulse,
                             const PlateModel& plate, const TimeGrid& grid);

}  // namespace ascan
